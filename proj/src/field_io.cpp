#include "crepair/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace crepair {
namespace {

void put_u32(std::ostream& os, std::uint32_t x) {
    unsigned char b[4] = {static_cast<unsigned char>(x & 0xff),
                          static_cast<unsigned char>((x >> 8) & 0xff),
                          static_cast<unsigned char>((x >> 16) & 0xff),
                          static_cast<unsigned char>((x >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4)) throw io_error("unexpected end of stream");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f64(std::ostream& os, double x) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, 8);
    unsigned char b[8];
    for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>((bits >> (8 * k)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::istream& is) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8)) throw io_error("unexpected end of stream");
    std::uint64_t bits = 0;
    for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(b[k]) << (8 * k);
    double x;
    std::memcpy(&x, &bits, 8);
    return x;
}

void expect_magic(std::istream& is, const char* magic) {
    char got[4];
    if (!is.read(got, 4)) throw io_error("unexpected end of stream reading magic");
    if (std::memcmp(got, magic, 4) != 0)
        throw io_error(std::string("bad magic, expected ") + magic);
}

void write_payload(std::ostream& os, const VelocityField& f) {
    for (double x : f.u_grid().data()) put_f64(os, x);
    for (double x : f.v_grid().data()) put_f64(os, x);
}

VelocityField read_payload(std::istream& is, int h, int w) {
    VelocityField f(h, w);
    for (double& x : f.u_grid().data()) x = get_f64(is);
    for (double& x : f.v_grid().data()) x = get_f64(is);
    return f;
}

}  // namespace

void write_vf01(std::ostream& os, const VelocityField& f) {
    os.write("VF01", 4);
    put_u32(os, 2);
    put_u32(os, static_cast<std::uint32_t>(f.height()));
    put_u32(os, static_cast<std::uint32_t>(f.width()));
    write_payload(os, f);
}

VelocityField read_vf01(std::istream& is) {
    expect_magic(is, "VF01");
    const std::uint32_t c = get_u32(is);
    if (c != 2) throw io_error("VF01: expected 2 components, got " + std::to_string(c));
    const int h = static_cast<int>(get_u32(is));
    const int w = static_cast<int>(get_u32(is));
    if (h < 1 || w < 1 || h > (1 << 20) || w > (1 << 20)) throw io_error("VF01: bad dimensions");
    return read_payload(is, h, w);
}

void write_vt01(std::ostream& os, const std::vector<VelocityField>& frames) {
    if (frames.empty()) throw io_error("VT01: empty trajectory");
    os.write("VT01", 4);
    put_u32(os, static_cast<std::uint32_t>(frames.size()));
    put_u32(os, 2);
    put_u32(os, static_cast<std::uint32_t>(frames[0].height()));
    put_u32(os, static_cast<std::uint32_t>(frames[0].width()));
    for (const auto& f : frames) {
        if (f.height() != frames[0].height() || f.width() != frames[0].width())
            throw io_error("VT01: inconsistent frame dimensions");
        write_payload(os, f);
    }
}

std::vector<VelocityField> read_vt01(std::istream& is) {
    expect_magic(is, "VT01");
    const std::uint32_t t = get_u32(is);
    const std::uint32_t c = get_u32(is);
    if (c != 2) throw io_error("VT01: expected 2 components");
    const int h = static_cast<int>(get_u32(is));
    const int w = static_cast<int>(get_u32(is));
    if (h < 1 || w < 1 || h > (1 << 20) || w > (1 << 20)) throw io_error("VT01: bad dimensions");
    std::vector<VelocityField> frames;
    frames.reserve(t);
    for (std::uint32_t k = 0; k < t; ++k) frames.push_back(read_payload(is, h, w));
    return frames;
}

void write_vf01_file(const std::string& path, const VelocityField& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot open for writing: " + path);
    write_vf01(os, f);
}

VelocityField read_vf01_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot open for reading: " + path);
    return read_vf01(is);
}

void write_vt01_file(const std::string& path, const std::vector<VelocityField>& frames) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot open for writing: " + path);
    write_vt01(os, frames);
}

std::vector<VelocityField> read_vt01_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot open for reading: " + path);
    return read_vt01(is);
}

}  // namespace crepair
