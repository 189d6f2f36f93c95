#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "crepair/field_io.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace crepair;

namespace {

bool bit_equal(const VelocityField& a, const VelocityField& b) {
    return a.height() == b.height() && a.width() == b.width() &&
           a.u_grid().data() == b.u_grid().data() && a.v_grid().data() == b.v_grid().data();
}

}  // namespace

TEST_CASE("VF01 stream round trip is bit exact") {
    VelocityField f = oracles::random_field(7, 5, 99);
    f.u(0, 0) = -0.0;  // signed zero must survive
    f.v(6, 4) = 1e-308;
    std::stringstream ss;
    write_vf01(ss, f);
    VelocityField g = read_vf01(ss);
    CHECK(bit_equal(f, g));
}

TEST_CASE("VT01 stream round trip is bit exact") {
    std::vector<VelocityField> frames;
    for (int t = 0; t < 4; ++t) frames.push_back(oracles::random_field(6, 6, 100 + t));
    std::stringstream ss;
    write_vt01(ss, frames);
    std::vector<VelocityField> got = read_vt01(ss);
    REQUIRE(got.size() == frames.size());
    for (std::size_t t = 0; t < frames.size(); ++t) CHECK(bit_equal(frames[t], got[t]));
}

TEST_CASE("file round trip") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "crepair_io_test";
    fs::create_directories(dir);
    const std::string path = (dir / "f.vf01").string();
    VelocityField f = oracles::random_field(5, 9, 4);
    write_vf01_file(path, f);
    CHECK(bit_equal(f, read_vf01_file(path)));
    fs::remove_all(dir);
}

TEST_CASE("bad magic is rejected") {
    std::stringstream ss("XXXXgarbage");
    CHECK_THROWS_AS(read_vf01(ss), io_error);
}

TEST_CASE("truncated stream is rejected") {
    VelocityField f = oracles::random_field(4, 4, 5);
    std::stringstream ss;
    write_vf01(ss, f);
    std::string bytes = ss.str();
    bytes.resize(bytes.size() / 2);
    std::stringstream cut(bytes);
    CHECK_THROWS_AS(read_vf01(cut), io_error);
}

TEST_CASE("empty trajectory is rejected on write") {
    std::stringstream ss;
    CHECK_THROWS_AS(write_vt01(ss, {}), io_error);
}

TEST_CASE("mixed frame dimensions are rejected on write") {
    std::vector<VelocityField> frames{oracles::random_field(4, 4, 1),
                                      oracles::random_field(5, 4, 2)};
    std::stringstream ss;
    CHECK_THROWS_AS(write_vt01(ss, frames), io_error);
}
