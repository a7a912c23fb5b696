#pragma once

#include <string>

#include "hallci/spectral.hpp"

namespace hallci {

// Binary layout (little-endian):
//   char[8]  "HALLSNP1"
//   uint32   n, uint32 components, uint64 mode count M
//   M records: int32 kx, ky, kz, then components x (float64 re, float64 im)
// Records appear in row-major k order (kx, then ky, then kz, ascending).
void write_snapshot(const std::string& path, const SpectralField& f);
SpectralField read_snapshot(const std::string& path);

}  // namespace hallci
