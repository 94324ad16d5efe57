#pragma once

#include <string>
#include <string_view>

#include "mudomains/dynamics.hpp"

namespace mudomains::cli {

/// Parses the map-spec mini-language into a validated SelfMap.
///
///   spec     := atom | 'chain' '[' atom (';' atom)* ']'      (first atom acts first)
///   atom     := 'id' DOMAIN
///             | 'aut' ('g2'|'g3') 'h=' mobius
///             | 'aut' 'tetra' letter+                        (written A1 A2 ... = A1 o A2 o ...)
///             | 'aut' 'penta' 'omega=' pair 'gamma=' mobius
///             | 'symlift' DOMAIN 'g=' word
///             | 'route' DOMAIN 'out=' outbound 'g=' word 'in=' inbound
///             | 'const' DOMAIN number{2 * dim}                (re/im pairs)
///   letter   := 'L(' mobius-args ')' | 'R(' mobius-args ')' | 'F'
///   mobius   := 'mobius(' theta ',' a_re ',' a_im ')'
///             | 'paper(' w_re ',' w_im ',' a_re ',' a_im ')'
///             | 'rot(' theta ')' | 'id'
///   word     := disc ('>' disc)*                              (left acts first)
///   disc     := mobius | 'scale(' re ',' im ')' | 'blaschke(' w_re ',' w_im [',' a_re ',' a_im] ')'
///   outbound := half-s | p | phi(w_re,w_im) | third-s1 | s3 | x1 | x2 | x3 | a
///   inbound  := form1(w_re,w_im[,a_re,a_im]) | form2(mobius) | pair(c_re,c_im) | axis-p
///             | triple(c1_re,c1_im,c2_re,c2_im) | axis-s3 | triangular(c_re,c_im)
///             | axis1 | axis2 | axis3 | penta-base(c_re,c_im) | penta-axis-a
///   pair     := '(' re ',' im ')'
///
/// Numbers accept decimal and exponent forms plus multiples of pi: pi, -pi/2,
/// 3pi/4, 2*pi. Throws Error(ParseError) on malformed input and
/// Error(InvalidSelfMap) when the parsed atoms fail validation.
SelfMap parse_map_spec(std::string_view text);

/// Canonical spec text; parse_map_spec(format_map_spec(f)) rebuilds f exactly.
std::string format_map_spec(const SelfMap& f);

/// Parses one real number with the pi forms above.
double parse_number(std::string_view text);

}  // namespace mudomains::cli
