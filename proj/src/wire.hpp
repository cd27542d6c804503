#pragma once

// Internal byte-level encode/decode helpers shared by the binary file formats.
// Integers and doubles are little-endian in the model containers; IDX uses
// big-endian u32 headers.

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "guardnet/error.hpp"

namespace guardnet::wire {

inline void put_u32le(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 24));
}

inline void put_u64le(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_f64le(std::vector<std::uint8_t>& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    put_u64le(out, bits);
}

inline void put_u32be(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

inline void put_string(std::vector<std::uint8_t>& out, const std::string& s) {
    put_u32le(out, static_cast<std::uint32_t>(s.size()));
    out.insert(out.end(), s.begin(), s.end());
}

/// Cursor over an in-memory file image. Every read checks the remaining
/// length and reports the current byte offset on failure.
class Reader {
public:
    Reader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}
    explicit Reader(const std::vector<std::uint8_t>& buf) : Reader(buf.data(), buf.size()) {}

    std::size_t offset() const { return pos_; }
    std::size_t remaining() const { return size_ - pos_; }
    bool at_end() const { return pos_ == size_; }

    void require(std::size_t n, const char* what) const {
        if (size_ - pos_ < n) {
            throw ParseError(std::string("truncated file: need ") + std::to_string(n) +
                                 " more bytes for " + what,
                             pos_);
        }
    }

    void bytes(void* out, std::size_t n, const char* what) {
        require(n, what);
        std::memcpy(out, data_ + pos_, n);
        pos_ += n;
    }

    std::uint32_t u32le(const char* what) {
        require(4, what);
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | data_[pos_ + static_cast<std::size_t>(i)];
        pos_ += 4;
        return v;
    }

    std::uint64_t u64le(const char* what) {
        require(8, what);
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | data_[pos_ + static_cast<std::size_t>(i)];
        pos_ += 8;
        return v;
    }

    double f64le(const char* what) {
        const std::uint64_t bits = u64le(what);
        double v;
        std::memcpy(&v, &bits, sizeof(v));
        return v;
    }

    std::uint32_t u32be(const char* what) {
        require(4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v = (v << 8) | data_[pos_ + static_cast<std::size_t>(i)];
        pos_ += 4;
        return v;
    }

    std::uint8_t u8(const char* what) {
        require(1, what);
        return data_[pos_++];
    }

    std::string string(const char* what) {
        const std::uint32_t len = u32le(what);
        require(len, what);
        std::string s(reinterpret_cast<const char*>(data_ + pos_), len);
        pos_ += len;
        return s;
    }

private:
    const std::uint8_t* data_;
    std::size_t size_;
    std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes);

}  // namespace guardnet::wire
