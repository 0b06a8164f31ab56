#pragma once

// Plain-text parameter files. Line oriented; '#' starts a comment; blank lines
// are ignored. Site indices are 1-based. Grammar:
//
//   network file                      waveguide geometry file
//   ------------                      -----------------------
//   format = network/1                format = waveguide-geometry/1
//   sites = <N>                       guides = <N>
//   site <i> <energy> [<label>]       coupling_scale = <C0>
//   coupling <m> <n> <value>          decay_length = <d0>
//                                     guide <i> <beta> [<label>]
//                                     separation <m> <n> <micrometres>
//
//   mapping file
//   ------------
//   format = mapping/1
//   unit_scale = <s>
//   bijection = <pi(1)> <pi(2)> ... <pi(N)>
//
// Every site/guide must be listed exactly once. Couplings not listed are zero;
// every guide pair needs a separation. Labels are single tokens. Numbers are
// written back in shortest round-trip form, so parse(serialize(x)) == x
// bitwise and serialize is idempotent.

#include <filesystem>
#include <string>
#include <string_view>

#include "aqs/hamiltonian.hpp"

namespace aqs {

SiteNetwork parse_network(std::string_view text);
std::string serialize_network(const SiteNetwork& net);
SiteNetwork load_network(const std::filesystem::path& path);

WaveguideGeometry parse_geometry(std::string_view text);
std::string serialize_geometry(const WaveguideGeometry& geom);
WaveguideGeometry load_geometry(const std::filesystem::path& path);

MappingRecord parse_mapping(std::string_view text);
std::string serialize_mapping(const MappingRecord& rec);
MappingRecord load_mapping(const std::filesystem::path& path);

// Sniffs the `format` line and builds the Hamiltonian from either file kind.
Hamiltonian load_hamiltonian(const std::filesystem::path& path);

}  // namespace aqs
