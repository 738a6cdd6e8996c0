#include "spdebem/basis_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>

namespace spdebem {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
void put(std::ostream& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get(std::istream& in, const std::string& path) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw IoError("truncated basis file '" + path + "'");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

constexpr char kMagic[4] = {'O', 'N', 'B', '2'};

}  // namespace

std::string manifest_path(const std::string& basis_path) { return basis_path + ".manifest"; }

void save_basis(const OrthonormalBasis& basis, const std::string& path) {
  if (basis.mask.size() != basis.cells() || basis.functions.rows() != basis.size() ||
      static_cast<std::size_t>(basis.functions.cols()) != basis.cells()) {
    throw DomainError("save_basis: inconsistent basis dimensions");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kBasisFormatVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(basis.shape.size()));
  out.write(basis.shape.data(), static_cast<std::streamsize>(basis.shape.size()));
  put<double>(out, basis.alpha);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(basis.resolution));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(basis.size()));
  for (const auto& r : basis.records) {
    put<double>(out, r.kappa);
    put<double>(out, r.lambda);
    put<std::uint32_t>(out, r.n_f);
    put<double>(out, r.residual);
  }
  out.write(reinterpret_cast<const char*>(basis.mask.data()), static_cast<std::streamsize>(basis.mask.size()));
  for (Eigen::Index n = 0; n < basis.functions.rows(); ++n) {
    for (Eigen::Index c = 0; c < basis.functions.cols(); ++c) put<double>(out, basis.functions(n, c));
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

OrthonormalBasis load_basis(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open basis file '" + path + "'");
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw IoError("'" + path + "' is not an ONB2 file");
  const auto version = get<std::uint32_t>(in, path);
  if (version != kBasisFormatVersion) {
    throw IoError("unsupported ONB2 version " + std::to_string(version) + " in '" + path + "'");
  }
  OrthonormalBasis b;
  const auto name_len = get<std::uint32_t>(in, path);
  if (name_len > 1u << 20) throw IoError("corrupt shape name in '" + path + "'");
  b.shape.resize(name_len);
  if (!in.read(b.shape.data(), name_len)) throw IoError("truncated basis file '" + path + "'");
  b.alpha = get<double>(in, path);
  b.resolution = static_cast<int>(get<std::uint32_t>(in, path));
  const auto n = get<std::uint32_t>(in, path);
  if (b.resolution < 3 || b.resolution % 2 == 0 || b.resolution > 1 << 14) {
    throw IoError("corrupt grid resolution in '" + path + "'");
  }
  for (std::uint32_t q = 0; q < n; ++q) {
    BasisRecord r;
    r.kappa = get<double>(in, path);
    r.lambda = get<double>(in, path);
    r.n_f = get<std::uint32_t>(in, path);
    r.residual = get<double>(in, path);
    b.records.push_back(r);
  }
  b.mask.resize(b.cells());
  if (!in.read(reinterpret_cast<char*>(b.mask.data()), static_cast<std::streamsize>(b.mask.size()))) {
    throw IoError("truncated basis file '" + path + "'");
  }
  b.functions.resize(n, static_cast<Eigen::Index>(b.cells()));
  for (Eigen::Index q = 0; q < b.functions.rows(); ++q) {
    for (Eigen::Index c = 0; c < b.functions.cols(); ++c) b.functions(q, c) = get<double>(in, path);
  }
  std::ifstream sidecar(manifest_path(path));
  if (sidecar) b.metadata = read_manifest(manifest_path(path));
  return b;
}

void write_manifest(const std::string& path, const std::map<std::string, std::string>& entries) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (const auto& [k, v] : entries) out << k << '=' << v << '\n';
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::map<std::string, std::string> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest '" + path + "'");
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

}  // namespace spdebem
