#pragma once

// Binary state persistence.  Format:
//   header: magic "TNSF", version u32 (= 1), dim u32, N u32, h f64, time f64,
//           ncomp u32
//   payload: per component, every complex coefficient as an interleaved
//            little-endian f64 pair, in row-major index order (last axis
//            fastest) running -N..N per axis.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tns/field.hpp"
#include "tns/lattice.hpp"

namespace tns {

namespace detail {

constexpr char kCheckpointMagic[4] = {'T', 'N', 'S', 'F'};
constexpr std::uint32_t kCheckpointVersion = 1;

inline void put_u32_le(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_f64_le(std::string& out, double d) {
  const auto v = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

struct ByteReader {
  const unsigned char* p;
  std::size_t left;
  const std::string& path;

  void need(std::size_t n) const {
    if (left < n)
      throw std::runtime_error("checkpoint '" + path + "' is truncated");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    p += 4;
    left -= 4;
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    p += 8;
    left -= 8;
    return std::bit_cast<double>(v);
  }
};

inline void append_components_le(std::string& out,
                                 const std::vector<std::vector<cplx>>& comps) {
  for (const auto& c : comps) {
    if constexpr (std::endian::native == std::endian::little) {
      // std::complex<double> is layout-compatible with double[2]
      const std::size_t bytes = c.size() * 2 * sizeof(double);
      const std::size_t base = out.size();
      out.resize(base + bytes);
      std::memcpy(out.data() + base, c.data(), bytes);
    } else {
      for (const cplx& z : c) {
        put_f64_le(out, z.real());
        put_f64_le(out, z.imag());
      }
    }
  }
}

inline void write_checkpoint_blob(const std::string& path, const FrequencyLattice& lat,
                                  double time,
                                  const std::vector<std::vector<cplx>>& comps) {
  std::string blob;
  blob.reserve(40 + comps.size() * lat.point_count() * 16);
  blob.append(kCheckpointMagic, 4);
  put_u32_le(blob, kCheckpointVersion);
  put_u32_le(blob, static_cast<std::uint32_t>(lat.dim));
  put_u32_le(blob, static_cast<std::uint32_t>(lat.N));
  put_f64_le(blob, lat.h);
  put_f64_le(blob, time);
  put_u32_le(blob, static_cast<std::uint32_t>(comps.size()));
  append_components_le(blob, comps);

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open checkpoint '" + path + "' for writing");
  os.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  if (!os) throw std::runtime_error("failed writing checkpoint '" + path + "'");
}

}  // namespace detail

// In-memory image of a checkpoint file; ncomp need not equal lattice.dim
// (scalar vorticity states are stored with one component).
struct Checkpoint {
  FrequencyLattice lattice;
  double time = 0.0;
  std::vector<std::vector<cplx>> components;

  SpectralVectorField as_vector_field() const {
    if (static_cast<int>(components.size()) != lattice.dim)
      throw std::runtime_error("checkpoint holds " + std::to_string(components.size()) +
                               " component(s), expected " + std::to_string(lattice.dim) +
                               " for a vector field");
    SpectralVectorField u(lattice, time);
    u.comp = components;
    return u;
  }

  SpectralScalarField as_scalar_field() const {
    if (components.size() != 1)
      throw std::runtime_error("checkpoint holds " + std::to_string(components.size()) +
                               " component(s), expected 1 for a scalar field");
    SpectralScalarField f(lattice, time);
    f.a = components[0];
    return f;
  }
};

inline void write_checkpoint(const std::string& path, const SpectralVectorField& u) {
  detail::write_checkpoint_blob(path, u.lattice, u.time, u.comp);
}

inline void write_checkpoint(const std::string& path, const SpectralScalarField& f) {
  detail::write_checkpoint_blob(path, f.lattice, f.time, {f.a});
}

inline Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open checkpoint '" + path + "'");
  std::string blob((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());

  detail::ByteReader r{reinterpret_cast<const unsigned char*>(blob.data()), blob.size(), path};
  r.need(4);
  if (std::memcmp(r.p, detail::kCheckpointMagic, 4) != 0)
    throw std::runtime_error("'" + path + "' is not a checkpoint file (bad magic)");
  r.p += 4;
  r.left -= 4;
  const std::uint32_t version = r.u32();
  if (version != detail::kCheckpointVersion)
    throw std::runtime_error("checkpoint '" + path + "' has unsupported version " +
                             std::to_string(version));
  const int dim = static_cast<int>(r.u32());
  const int N = static_cast<int>(r.u32());
  const double h = r.f64();

  Checkpoint cp;
  cp.lattice = make_lattice(dim, N, h);  // validates dim/N/h
  cp.time = r.f64();
  const std::uint32_t ncomp = r.u32();
  if (ncomp == 0 || ncomp > 3)
    throw std::runtime_error("checkpoint '" + path + "' has invalid component count " +
                             std::to_string(ncomp));

  const std::size_t n = cp.lattice.point_count();
  r.need(static_cast<std::size_t>(ncomp) * n * 16);
  cp.components.assign(ncomp, std::vector<cplx>(n));
  for (std::uint32_t c = 0; c < ncomp; ++c) {
    if constexpr (std::endian::native == std::endian::little) {
      std::memcpy(cp.components[c].data(), r.p, n * 16);
      r.p += n * 16;
      r.left -= n * 16;
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        const double re = r.f64();
        const double im = r.f64();
        cp.components[c][i] = cplx{re, im};
      }
    }
  }
  if (r.left != 0)
    throw std::runtime_error("checkpoint '" + path + "' has trailing bytes");
  return cp;
}

}  // namespace tns
