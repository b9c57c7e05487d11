#include "vnps/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "vnps/error.hpp"

namespace vnps {

namespace {

using nlohmann::json;

void put_u64(std::string& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xffu));
}

std::uint64_t get_u64(std::string_view in) {
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= std::uint64_t{static_cast<unsigned char>(in[static_cast<std::size_t>(b)])} << (8 * b);
  return v;
}

void put_double(std::string& out, double d) { put_u64(out, std::bit_cast<std::uint64_t>(d)); }

double get_double(std::string_view in) { return std::bit_cast<double>(get_u64(in)); }

void put_cplx(std::string& out, cplx c) {
  put_double(out, c.real());
  put_double(out, c.imag());
}

struct Parsed {
  json header;
  std::string_view blob;
};

Parsed split_container(std::string_view bytes, const char* kind) {
  if (bytes.size() < 8) throw FormatError("container: truncated or empty input");
  const std::uint64_t hlen = get_u64(bytes);
  if (hlen > bytes.size() - 8) throw FormatError("container: header length exceeds input");
  Parsed p;
  try {
    p.header = json::parse(bytes.substr(8, hlen));
  } catch (const json::exception& e) {
    throw FormatError(std::string("container: bad header: ") + e.what());
  }
  if (!p.header.is_object()) throw FormatError("container: header is not an object");
  try {
    if (p.header.at("version").get<int>() != kContainerVersion)
      throw FormatError("container: unsupported version " + p.header.at("version").dump());
    if (p.header.at("kind").get<std::string>() != kind)
      throw FormatError("container: expected kind '" + std::string(kind) + "'");
    const auto blob_bytes = p.header.at("blob_bytes").get<std::uint64_t>();
    if (blob_bytes != bytes.size() - 8 - hlen) throw FormatError("container: blob length mismatch");
  } catch (const json::exception& e) {
    throw FormatError(std::string("container: bad header field: ") + e.what());
  }
  p.blob = bytes.substr(8 + hlen);
  return p;
}

std::vector<std::size_t> read_bonds(const json& header) {
  std::vector<std::size_t> bonds;
  std::size_t n = 0;
  try {
    bonds = header.at("bond_dims").get<std::vector<std::size_t>>();
    n = header.at("n_sites").get<std::size_t>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("container: bad header field: ") + e.what());
  }
  if (n == 0 || bonds.size() != n + 1 || bonds.front() != 1 || bonds.back() != 1)
    throw FormatError("container: inconsistent bond dimensions");
  for (std::size_t b : bonds)
    if (b == 0 || b > (std::size_t{1} << 20)) throw FormatError("container: bond dimension out of range");
  return bonds;
}

std::string assemble(json header, const std::string& blob) {
  header["blob_bytes"] = blob.size();
  const std::string h = header.dump();
  std::string out;
  out.reserve(8 + h.size() + blob.size());
  put_u64(out, h.size());
  out += h;
  out += blob;
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

std::string serialize(const Mps& mps) {
  json header;
  header["version"] = kContainerVersion;
  header["kind"] = "mps";
  header["n_sites"] = mps.size();
  header["bond_dims"] = mps.bond_dims();
  const auto& f = mps.form();
  switch (f.kind) {
    case CanonicalForm::Kind::none:
      header["canonical_center"] = nullptr;
      header["canonical_kind"] = "none";
      break;
    case CanonicalForm::Kind::center:
      header["canonical_center"] = f.center;
      header["canonical_kind"] = "center";
      break;
    case CanonicalForm::Kind::right:
      header["canonical_center"] = 0;
      header["canonical_kind"] = "right";
      break;
  }
  std::string blob;
  for (const auto& t : mps.tensors())
    for (Eigen::Index k = 0; k < t.size(); ++k) put_cplx(blob, t.data()[k]);
  return assemble(std::move(header), blob);
}

std::string serialize(const Mpo& mpo) {
  json header;
  header["version"] = kContainerVersion;
  header["kind"] = "mpo";
  header["n_sites"] = mpo.size();
  header["bond_dims"] = mpo.bond_dims();
  header["canonical_center"] = nullptr;
  header["hermitian"] = mpo.hermitian();
  std::string blob;
  for (const auto& t : mpo.tensors())
    for (const cplx& c : t.data) put_cplx(blob, c);
  return assemble(std::move(header), blob);
}

Mps deserialize_mps(std::string_view bytes) {
  const Parsed p = split_container(bytes, "mps");
  const auto bonds = read_bonds(p.header);
  const std::size_t n = bonds.size() - 1;
  std::size_t total = 0;
  for (std::size_t i = 0; i < n; ++i) total += bonds[i] * 2 * bonds[i + 1];
  if (p.blob.size() != total * 16) throw FormatError("container: blob does not match bond dimensions");
  CanonicalForm form;
  const std::string kind = p.header.value("canonical_kind", std::string("none"));
  if (kind == "right") {
    form.kind = CanonicalForm::Kind::right;
  } else if (kind == "center") {
    form.kind = CanonicalForm::Kind::center;
    if (!p.header["canonical_center"].is_number_unsigned()) throw FormatError("container: bad canonical_center");
    form.center = p.header["canonical_center"].get<std::size_t>();
    if (form.center >= n) throw FormatError("container: canonical_center out of range");
  } else if (kind != "none") {
    throw FormatError("container: unknown canonical_kind '" + kind + "'");
  }
  std::vector<Mat> tensors;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Mat t(static_cast<Eigen::Index>(2 * bonds[i]), static_cast<Eigen::Index>(bonds[i + 1]));
    for (Eigen::Index k = 0; k < t.size(); ++k, pos += 16)
      t.data()[k] = cplx(get_double(p.blob.substr(pos)), get_double(p.blob.substr(pos + 8)));
    tensors.push_back(std::move(t));
  }
  return Mps(std::move(tensors), form);
}

Mpo deserialize_mpo(std::string_view bytes) {
  const Parsed p = split_container(bytes, "mpo");
  const auto bonds = read_bonds(p.header);
  const std::size_t n = bonds.size() - 1;
  std::size_t total = 0;
  for (std::size_t i = 0; i < n; ++i) total += bonds[i] * 4 * bonds[i + 1];
  if (p.blob.size() != total * 16) throw FormatError("container: blob does not match bond dimensions");
  std::vector<MpoTensor> tensors;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < n; ++i) {
    MpoTensor t(bonds[i], bonds[i + 1]);
    for (auto& c : t.data) {
      c = cplx(get_double(p.blob.substr(pos)), get_double(p.blob.substr(pos + 8)));
      pos += 16;
    }
    tensors.push_back(std::move(t));
  }
  return Mpo(std::move(tensors), p.header.value("hermitian", false));
}

void save(const std::string& path, const Mps& mps) { write_file(path, serialize(mps)); }
void save(const std::string& path, const Mpo& mpo) { write_file(path, serialize(mpo)); }
Mps load_mps(const std::string& path) { return deserialize_mps(read_file(path)); }
Mpo load_mpo(const std::string& path) { return deserialize_mpo(read_file(path)); }

}  // namespace vnps
