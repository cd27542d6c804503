#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "guardnet/assertion.hpp"
#include "guardnet/tensor.hpp"

using namespace guardnet;

TEST_CASE("build_ae halves widths to the bottleneck and mirrors back") {
    CHECK(build_ae(64, 5).layer_widths == std::vector<std::size_t>{64, 32, 16, 32, 64});
    CHECK(build_ae(1, 5).layer_widths == std::vector<std::size_t>{1, 1, 1, 1, 1});
    CHECK(build_ae(10, 3).layer_widths == std::vector<std::size_t>{10, 5, 10});
    CHECK(build_ae(7, 5).layer_widths == std::vector<std::size_t>{7, 3, 1, 3, 7});

    CHECK_THROWS_AS(build_ae(10, 4), ConfigError);
    CHECK_THROWS_AS(build_ae(10, 1), ConfigError);
    CHECK_THROWS_AS(build_ae(0, 5), ConfigError);
}

TEST_CASE("build_ae widths are symmetric and non-increasing to the bottleneck") {
    Rng rng(17);
    for (int iter = 0; iter < 50; ++iter) {
        const std::size_t dim = 1 + rng.next_below(300);
        const std::size_t depth = 3 + 2 * rng.next_below(4);
        const AeSpec spec = build_ae(dim, depth);
        REQUIRE(spec.layer_widths.size() == depth);
        CHECK(spec.layer_widths.front() == dim);
        for (std::size_t i = 0; i < depth; ++i) {
            CHECK(spec.layer_widths[i] == spec.layer_widths[depth - 1 - i]);
        }
        for (std::size_t i = 0; i < depth / 2; ++i) {
            CHECK(spec.layer_widths[i + 1] <= spec.layer_widths[i]);
            CHECK(spec.layer_widths[i + 1] >= 1);
        }
    }
}

TEST_CASE("make_ae_network builds dense/relu chain with linear output") {
    Rng rng(1);
    const Network ae = make_ae_network(build_ae(16, 5), rng);
    REQUIRE(ae.layers().size() == 7);  // 4 dense, 3 relu between them
    CHECK(ae.layers().front().kind == LayerKind::dense);
    CHECK(ae.layers().back().kind == LayerKind::dense);
    CHECK(ae.layers().front().in_dim == 16);
    CHECK(ae.layers().back().out_dim == 16);

    const Tensor x = Tensor::from_vector(std::vector<double>(16, 0.5));
    CHECK(forward(ae, x).size() == 16);
}

TEST_CASE("constant activations are reproduced almost exactly") {
    // Sanity bound first: zero weights plus an output bias equal to the
    // constant vector reconstruct it with zero loss, so training has an
    // exact optimum to find.
    const std::size_t dim = 8;
    Tensor constant({dim});
    for (std::size_t i = 0; i < dim; ++i) constant[i] = 0.3 + 0.1 * static_cast<double>(i);

    const AeSpec spec = build_ae(dim, 5);
    {
        Rng rng(0);
        Network analytic = make_ae_network(spec, rng);
        for (Layer& layer : analytic.layers()) {
            if (!layer.has_parameters()) continue;
            for (std::size_t i = 0; i < layer.weight.size(); ++i) layer.weight[i] = 0.0;
            for (std::size_t i = 0; i < layer.bias.size(); ++i) layer.bias[i] = 0.0;
        }
        Layer& last = analytic.layers().back();
        for (std::size_t i = 0; i < dim; ++i) last.bias[i] = constant[i];
        CHECK(mse(forward(analytic, constant), constant) == 0.0);
    }

    std::vector<Tensor> activations(64, constant);
    Rng rng(42);
    const Assertion assertion =
        train_assertion(spec, "relu1", activations, {200, 16, 0.05}, rng);

    double norm2 = 0.0;
    for (std::size_t i = 0; i < dim; ++i) norm2 += constant[i] * constant[i];
    CHECK(assertion.mean_loss() <= 1e-3 * (norm2 / static_cast<double>(dim)));
}

TEST_CASE("zero learning rate keeps AE parameters at initialization") {
    const AeSpec spec = build_ae(6, 3);
    std::vector<Tensor> activations;
    Rng data_rng(9);
    for (int i = 0; i < 10; ++i) activations.push_back(draw_normal(data_rng, {6}, 0.0, 1.0));

    Rng init_rng(314);
    const Network init_net = make_ae_network(spec, init_rng);

    Rng train_rng(314);
    const Assertion assertion =
        train_assertion(spec, "relu1", activations, {5, 4, 0.0}, train_rng);
    for (std::size_t l = 0; l < init_net.layers().size(); ++l) {
        CHECK(assertion.ae().layers()[l].weight == init_net.layers()[l].weight);
        CHECK(assertion.ae().layers()[l].bias == init_net.layers()[l].bias);
    }
}

TEST_CASE("a real bottleneck beats a width-1 bottleneck on planar data") {
    // Activations live on a 2-D subspace of 16-D space; an AE whose widths
    // collapse to 1 cannot represent both coordinates.
    const std::size_t dim = 16;
    Rng data_rng(21);
    Tensor basis_a = draw_normal(data_rng, {dim}, 0.0, 1.0);
    Tensor basis_b = draw_normal(data_rng, {dim}, 0.0, 1.0);
    std::vector<Tensor> activations;
    for (int i = 0; i < 200; ++i) {
        const double u = data_rng.next_normal(0.0, 1.0);
        const double v = data_rng.next_normal(0.0, 1.0);
        Tensor x({dim});
        for (std::size_t d = 0; d < dim; ++d) x[d] = u * basis_a[d] + v * basis_b[d];
        activations.push_back(std::move(x));
    }

    const TrainConfig cfg{60, 16, 0.01};
    Rng rng_wide(3);
    const Assertion wide =
        train_assertion(build_ae(dim, 5), "relu1", activations, cfg, rng_wide);

    AeSpec pinched = build_ae(dim, 5);
    for (std::size_t i = 1; i + 1 < pinched.layer_widths.size(); ++i) {
        pinched.layer_widths[i] = 1;
    }
    Rng rng_pinched(3);
    const Assertion narrow =
        train_assertion(pinched, "relu1", activations, cfg, rng_pinched);

    CHECK(wide.mean_loss() < narrow.mean_loss());
}

TEST_CASE("assertion_check compares loss against the threshold strictly") {
    Rng rng(11);
    Assertion assertion("relu1", make_ae_network(build_ae(4, 3), rng));

    const Tensor ir = Tensor::from_vector({0.5, -0.25, 1.0, 0.75});
    CHECK_THROWS_AS(assertion_check(ir, assertion), StateError);

    // Measure the loss under a generous threshold first.
    assertion.set_calibration(1.0, 1e9, 2.0);
    const double loss = assertion_check(ir, assertion).loss;

    // A threshold exactly at the loss still passes: the comparison is strict.
    Assertion at_loss = assertion;
    at_loss.set_calibration(1.0, loss, 2.0);
    const AssertionCheck exact = assertion_check(ir, at_loss);
    CHECK(exact.loss == loss);
    CHECK(exact.passed);

    Assertion below = assertion;
    below.set_calibration(1.0, std::nextafter(loss, 0.0), 2.0);
    CHECK_FALSE(assertion_check(ir, below).passed);

    CHECK_THROWS_AS(assertion_check(Tensor::from_vector({1.0}), at_loss), ShapeError);
}

TEST_CASE("fixed points pass for any threshold") {
    // Zero weights and biases reconstruct the zero vector exactly.
    Rng rng(5);
    Network ae = make_ae_network(build_ae(4, 3), rng);
    for (Layer& layer : ae.layers()) {
        if (!layer.has_parameters()) continue;
        for (std::size_t i = 0; i < layer.weight.size(); ++i) layer.weight[i] = 0.0;
        for (std::size_t i = 0; i < layer.bias.size(); ++i) layer.bias[i] = 0.0;
    }
    Assertion assertion("relu1", std::move(ae));
    assertion.set_calibration(0.0, 0.0, 3.0);
    const AssertionCheck check = assertion_check(Tensor({4}), assertion);
    CHECK(check.loss == 0.0);
    CHECK(check.passed);
}

TEST_CASE("off-manifold probes fail where the centroid passes at delta 3") {
    const std::size_t dim = 12;
    Rng data_rng(33);
    const Tensor centroid = Tensor::full({dim}, 2.0);
    std::vector<Tensor> activations;
    for (int i = 0; i < 300; ++i) {
        Tensor x = centroid;
        for (std::size_t d = 0; d < dim; ++d) x[d] += data_rng.next_normal(0.0, 1.0);
        activations.push_back(std::move(x));
    }

    Rng rng(2);
    Assertion assertion =
        train_assertion(build_ae(dim, 5), "relu1", activations, {60, 16, 0.01}, rng);

    double loss_sum = 0.0;
    for (const Tensor& x : activations) {
        loss_sum += mse(forward(assertion.ae(), x), x);
    }
    const double mean_loss = loss_sum / activations.size();
    assertion.set_calibration(mean_loss, 3.0 * mean_loss, 3.0);

    Tensor far = centroid;
    far[0] += 50.0;  // 50 sigma off the training manifold

    const AssertionCheck center_check = assertion_check(centroid, assertion);
    const AssertionCheck far_check = assertion_check(far, assertion);
    CHECK(far_check.loss > center_check.loss);
    CHECK(center_check.passed);
    CHECK_FALSE(far_check.passed);
}

TEST_CASE("training-set fail rate at delta >= 1 stays below 1") {
    Rng data_rng(71);
    std::vector<Tensor> activations;
    for (int i = 0; i < 50; ++i) activations.push_back(draw_normal(data_rng, {6}, 0.0, 1.0));

    Rng rng(4);
    Assertion assertion =
        train_assertion(build_ae(6, 3), "relu1", activations, {20, 8, 0.01}, rng);
    assertion.set_calibration(assertion.mean_loss(), assertion.mean_loss(), 1.0);

    std::size_t failures = 0;
    for (const Tensor& x : activations) {
        if (!assertion_check(x, assertion).passed) ++failures;
    }
    CHECK(failures < activations.size());
}

TEST_CASE("raising the threshold never converts a pass into a fail") {
    Rng data_rng(15);
    std::vector<Tensor> activations;
    for (int i = 0; i < 40; ++i) activations.push_back(draw_normal(data_rng, {5}, 0.0, 1.0));
    Rng rng(6);
    Assertion base =
        train_assertion(build_ae(5, 3), "relu1", activations, {10, 8, 0.02}, rng);
    base.set_calibration(base.mean_loss(), 2.0 * base.mean_loss(), 2.0);

    Assertion scaled = base;
    scaled.set_calibration(base.mean_loss(), 3.5 * base.mean_loss(), 3.5);

    Rng probe_rng(100);
    for (int i = 0; i < 200; ++i) {
        const Tensor probe = draw_normal(probe_rng, {5}, 0.0, 3.0);
        if (assertion_check(probe, base).passed) {
            CHECK(assertion_check(probe, scaled).passed);
        }
    }
}

TEST_CASE("train_assertion validates its inputs") {
    const AeSpec spec = build_ae(4, 3);
    Rng rng(1);
    CHECK_THROWS_AS(train_assertion(spec, "relu1", {}, {1, 1, 0.1}, rng), DataError);
    CHECK_THROWS_AS(
        train_assertion(spec, "relu1", {Tensor::from_vector({1.0})}, {1, 1, 0.1}, rng),
        ShapeError);
}
