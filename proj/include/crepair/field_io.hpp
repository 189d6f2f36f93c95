#ifndef CREPAIR_FIELD_IO_HPP
#define CREPAIR_FIELD_IO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "crepair/fields.hpp"

namespace crepair {

// VF01: magic "VF01", then u32 LE C (=2), H, W, then C*H*W f64 LE values,
// component-major then row-major.
// VT01: magic "VT01", u32 LE T, then C, H, W once, then T payloads with the
// per-frame magic and dims omitted.

void write_vf01(std::ostream& os, const VelocityField& f);
VelocityField read_vf01(std::istream& is);

void write_vf01_file(const std::string& path, const VelocityField& f);
VelocityField read_vf01_file(const std::string& path);

void write_vt01(std::ostream& os, const std::vector<VelocityField>& frames);
std::vector<VelocityField> read_vt01(std::istream& is);

void write_vt01_file(const std::string& path, const std::vector<VelocityField>& frames);
std::vector<VelocityField> read_vt01_file(const std::string& path);

}  // namespace crepair

#endif
