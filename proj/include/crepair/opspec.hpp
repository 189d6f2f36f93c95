#ifndef CREPAIR_OPSPEC_HPP
#define CREPAIR_OPSPEC_HPP

#include <string>

#include "crepair/compose.hpp"

namespace crepair::opspec {

// Operator spec grammar:
//   base       := raw | fft | jacobi:k=20 | sor:k=20,omega=1.5 | cg:k=20
//               | mg:cycles=2 | direct | screened:lambda=8,k=20,solver=jacobi
//               | geo:lb=32,lc=4,w=2,k=20,solver=jacobi
//   suffixes   := +taper:w=2 | +blend:alpha=0.1 | +gate:tau=0.6,q=1.0
//   frame tag  := @physical | @normalized
// Example: screened:lambda=8,k=20,solver=jacobi+taper:w=2@physical

/// Parse one operator spec string. Throws parse_error naming the offending
/// token on malformed input.
compose::CleanupSpec parse(const std::string& text);

/// Grammar summary for --help output.
std::string grammar_help();

}  // namespace crepair::opspec

#endif
