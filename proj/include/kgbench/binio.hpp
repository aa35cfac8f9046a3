#pragma once
// Little binary buffer writer/reader shared by the on-disk formats.
// Fixed-width little-endian integers, float32, and length-prefixed
// strings. The reader throws on any attempt to read past the end.

#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>

namespace kgbench {

class ByteWriter {
  public:
    void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
    void u32(std::uint32_t v) { raw(&v, sizeof v); }
    void u64(std::uint64_t v) { raw(&v, sizeof v); }
    void f32(float v) { raw(&v, sizeof v); }
    void f64(double v) { raw(&v, sizeof v); }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        buf_.append(s);
    }
    void raw(const void* p, std::size_t n) {
        buf_.append(static_cast<const char*>(p), n);
    }

    const std::string& bytes() const { return buf_; }
    std::string take() { return std::move(buf_); }

  private:
    std::string buf_;
};

class ByteReader {
  public:
    explicit ByteReader(const std::string& bytes) : data_(bytes) {}

    std::uint8_t u8() {
        need(1);
        return static_cast<std::uint8_t>(data_[pos_++]);
    }
    std::uint32_t u32() { return fixed<std::uint32_t>(); }
    std::uint64_t u64() { return fixed<std::uint64_t>(); }
    float f32() { return fixed<float>(); }
    double f64() { return fixed<double>(); }
    std::string str() {
        std::uint32_t n = u32();
        need(n);
        std::string s = data_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    void raw(void* p, std::size_t n) {
        need(n);
        std::memcpy(p, data_.data() + pos_, n);
        pos_ += n;
    }

    std::size_t pos() const { return pos_; }
    std::size_t remaining() const { return data_.size() - pos_; }
    bool exhausted() const { return pos_ == data_.size(); }

  private:
    template <typename T> T fixed() {
        T v;
        need(sizeof v);
        std::memcpy(&v, data_.data() + pos_, sizeof v);
        pos_ += sizeof v;
        return v;
    }
    void need(std::size_t n) {
        if (data_.size() - pos_ < n) throw std::out_of_range("unexpected end of data");
    }

    const std::string& data_;
    std::size_t pos_ = 0;
};

} // namespace kgbench
