// Dataset persistence. Binary layout (all little-endian):
//
//   magic "ERSI" (4 bytes)
//   format version       u32
//   lambda, mu, kappa    f64 x3
//   R                    f64
//   N_ob                 u32
//   N_s                  u32
//   noise level          f64
//   seed                 u64
//   observation points   N_ob x 3 f64
//   u array              N_s x N_ob x 3 complex, interleaved f64 (re, im)
//   Du array             same layout

#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "ersi/forward.hpp"

namespace ersi {

static_assert(std::endian::native == std::endian::little,
              "dataset I/O assumes a little-endian host");

inline constexpr std::uint32_t kDatasetFormatVersion = 1;

namespace io_detail {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

template <class T>
void write_pod(std::FILE* f, const T& v) {
  if (std::fwrite(&v, sizeof(T), 1, f) != 1) throw IoError("dataset write failed");
}

template <class T>
void write_array(std::FILE* f, const T* data, std::size_t count) {
  if (count == 0) return;
  if (std::fwrite(data, sizeof(T), count, f) != count)
    throw IoError("dataset write failed");
}

template <class T>
T read_pod(std::FILE* f) {
  T v;
  if (std::fread(&v, sizeof(T), 1, f) != 1) throw IoError("dataset read failed");
  return v;
}

template <class T>
void read_array(std::FILE* f, T* data, std::size_t count) {
  if (count == 0) return;
  if (std::fread(data, sizeof(T), count, f) != count)
    throw IoError("dataset read failed: truncated file");
}

}  // namespace io_detail

inline void write_dataset(const std::string& path, const Dataset& ds) {
  using namespace io_detail;
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw IoError("cannot open '" + path + "' for writing");

  if (std::fwrite("ERSI", 1, 4, f.get()) != 4) throw IoError("dataset write failed");
  write_pod(f.get(), kDatasetFormatVersion);
  write_pod(f.get(), ds.material.lambda());
  write_pod(f.get(), ds.material.mu());
  write_pod(f.get(), ds.material.kappa());
  write_pod(f.get(), ds.obs.radius());
  write_pod(f.get(), static_cast<std::uint32_t>(ds.obs.size()));
  write_pod(f.get(), static_cast<std::uint32_t>(ds.n_samples));
  write_pod(f.get(), ds.noise_level);
  write_pod(f.get(), ds.seed);

  for (const Vec3& p : ds.obs.points()) {
    write_pod(f.get(), p.x);
    write_pod(f.get(), p.y);
    write_pod(f.get(), p.z);
  }
  // std::complex<double> is layout-compatible with double[2] (re, im).
  write_array(f.get(), reinterpret_cast<const double*>(ds.u.data()), 2 * ds.u.size());
  write_array(f.get(), reinterpret_cast<const double*>(ds.du.data()), 2 * ds.du.size());
  if (std::fflush(f.get()) != 0) throw IoError("dataset flush failed");
}

inline Dataset read_dataset(const std::string& path) {
  using namespace io_detail;
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw IoError("cannot open '" + path + "' for reading");

  char magic[4];
  if (std::fread(magic, 1, 4, f.get()) != 4 || std::memcmp(magic, "ERSI", 4) != 0)
    throw IoError("'" + path + "' is not an ERSI dataset");
  const auto version = read_pod<std::uint32_t>(f.get());
  if (version != kDatasetFormatVersion)
    throw IoError("unsupported dataset format version " + std::to_string(version));

  const double lambda = read_pod<double>(f.get());
  const double mu = read_pod<double>(f.get());
  const double kappa = read_pod<double>(f.get());
  const double radius = read_pod<double>(f.get());
  const auto n_obs = read_pod<std::uint32_t>(f.get());
  const auto n_samples = read_pod<std::uint32_t>(f.get());
  const double noise = read_pod<double>(f.get());
  const auto seed = read_pod<std::uint64_t>(f.get());

  std::vector<Vec3> pts(n_obs);
  for (auto& p : pts) {
    p.x = read_pod<double>(f.get());
    p.y = read_pod<double>(f.get());
    p.z = read_pod<double>(f.get());
  }

  Dataset ds(MaterialParams(lambda, mu, kappa),
             ObservationSet(radius, std::move(pts)));
  ds.n_samples = n_samples;
  ds.noise_level = noise;
  ds.seed = seed;
  const std::size_t n = static_cast<std::size_t>(n_samples) * n_obs * 3;
  ds.u.resize(n);
  ds.du.resize(n);
  read_array(f.get(), reinterpret_cast<double*>(ds.u.data()), 2 * n);
  read_array(f.get(), reinterpret_cast<double*>(ds.du.data()), 2 * n);
  return ds;
}

}  // namespace ersi
