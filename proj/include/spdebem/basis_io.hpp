#ifndef SPDEBEM_BASIS_IO_HPP
#define SPDEBEM_BASIS_IO_HPP

#include <map>
#include <string>

#include "spdebem/basis.hpp"

namespace spdebem {

inline constexpr std::uint32_t kBasisFormatVersion = 1;

/// Writes the little-endian ONB2 container. Throws IoError.
void save_basis(const OrthonormalBasis& basis, const std::string& path);

/// Reads an ONB2 container; metadata is filled from the manifest sidecar if present.
OrthonormalBasis load_basis(const std::string& path);

/// "<path>.manifest"
std::string manifest_path(const std::string& basis_path);

/// key=value lines, sorted by key.
void write_manifest(const std::string& path, const std::map<std::string, std::string>& entries);
std::map<std::string, std::string> read_manifest(const std::string& path);

}  // namespace spdebem

#endif  // SPDEBEM_BASIS_IO_HPP
