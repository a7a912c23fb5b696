#include "hallci/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace hallci {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

namespace {
constexpr char kMagic[8] = {'H', 'A', 'L', 'L', 'S', 'N', 'P', '1'};

template <class T>
void put(std::ofstream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T get(std::ifstream& is) {
  T v;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw std::runtime_error("snapshot truncated");
  return v;
}
}  // namespace

void write_snapshot(const std::string& path, const SpectralField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os.write(kMagic, 8);
  put<std::uint32_t>(os, std::uint32_t(f.grid().n()));
  put<std::uint32_t>(os, std::uint32_t(f.components()));
  put<std::uint64_t>(os, std::uint64_t(f.modes()));
  for (std::size_t i = 0; i < f.modes(); ++i) {
    const Wavevector k = f.k(i);
    put<std::int32_t>(os, k.x);
    put<std::int32_t>(os, k.y);
    put<std::int32_t>(os, k.z);
    for (int c = 0; c < f.components(); ++c) {
      put<double>(os, f.row(i)[c].real());
      put<double>(os, f.row(i)[c].imag());
    }
  }
  if (!os) throw std::runtime_error("write failed: " + path);
}

SpectralField read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) throw std::runtime_error("bad snapshot magic in " + path);
  const auto n = get<std::uint32_t>(is);
  const auto comps = get<std::uint32_t>(is);
  const auto count = get<std::uint64_t>(is);
  SpectralField f{Grid{int(n)}, int(comps)};
  f.reserve(count);
  std::vector<cplx> row(comps);
  for (std::uint64_t i = 0; i < count; ++i) {
    Wavevector k;
    k.x = get<std::int32_t>(is);
    k.y = get<std::int32_t>(is);
    k.z = get<std::int32_t>(is);
    for (auto& v : row) {
      const double re = get<double>(is);
      const double im = get<double>(is);
      v = {re, im};
    }
    f.push(k, row.data());
  }
  f.finalize();
  return f;
}

}  // namespace hallci
