#pragma once

#include <string>
#include <string_view>

#include "vnps/mpo.hpp"
#include "vnps/mps.hpp"

namespace vnps {

// Container layout: u64 little-endian header length, a JSON header
// {version, kind, n_sites, bond_dims, canonical_center, blob_bytes, ...},
// then the tensors as little-endian complex doubles (real, imag), site-major
// in (left, physical, right) order for states and (left, out, in, right) for
// operators.

inline constexpr int kContainerVersion = 1;

std::string serialize(const Mps& mps);
std::string serialize(const Mpo& mpo);
Mps deserialize_mps(std::string_view bytes);
Mpo deserialize_mpo(std::string_view bytes);

void save(const std::string& path, const Mps& mps);
void save(const std::string& path, const Mpo& mpo);
Mps load_mps(const std::string& path);
Mpo load_mpo(const std::string& path);

}  // namespace vnps
