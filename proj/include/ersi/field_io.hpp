// Reconstructed-field persistence. Same header discipline as the dataset
// format: magic, format version, then the full run-configuration echo,
// followed by the grid description and the six f64 arrays (three raw
// sigma_j^2 fields, then their clamped copies), little-endian throughout.

#pragma once

#include <cstdint>
#include <cstring>
#include <string>

#include "ersi/dataset_io.hpp"
#include "ersi/reconstruct.hpp"

namespace ersi {

inline constexpr std::uint32_t kFieldFormatVersion = 1;

inline void write_field(const std::string& path, const VarianceField& field,
                        const std::string& config_echo) {
  using namespace io_detail;
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw IoError("cannot open '" + path + "' for writing");

  if (std::fwrite("ERSF", 1, 4, f.get()) != 4) throw IoError("field write failed");
  write_pod(f.get(), kFieldFormatVersion);
  write_pod(f.get(), static_cast<std::uint32_t>(config_echo.size()));
  write_array(f.get(), config_echo.data(), config_echo.size());

  const SourceGrid& g = field.grid;
  for (double v : {g.box().lo.x, g.box().lo.y, g.box().lo.z, g.box().hi.x,
                   g.box().hi.y, g.box().hi.z})
    write_pod(f.get(), v);
  for (int a = 0; a < 3; ++a)
    write_pod(f.get(), static_cast<std::uint32_t>(g.count(a)));
  for (double v : {g.step().x, g.step().y, g.step().z}) write_pod(f.get(), v);
  write_pod(f.get(), field.max_imag_residue);
  write_pod(f.get(), static_cast<std::uint64_t>(field.skipped_points));

  for (const auto& arr : field.raw) write_array(f.get(), arr.data(), arr.size());
  for (const auto& arr : field.clamped) write_array(f.get(), arr.data(), arr.size());
  if (std::fflush(f.get()) != 0) throw IoError("field flush failed");
}

struct FieldFile {
  VarianceField field;
  std::string config_echo;
};

inline FieldFile read_field(const std::string& path) {
  using namespace io_detail;
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw IoError("cannot open '" + path + "' for reading");

  char magic[4];
  if (std::fread(magic, 1, 4, f.get()) != 4 || std::memcmp(magic, "ERSF", 4) != 0)
    throw IoError("'" + path + "' is not an ERSF field dump");
  const auto version = read_pod<std::uint32_t>(f.get());
  if (version != kFieldFormatVersion)
    throw IoError("unsupported field format version " + std::to_string(version));

  const auto cfg_len = read_pod<std::uint32_t>(f.get());
  std::string echo(cfg_len, '\0');
  read_array(f.get(), echo.data(), cfg_len);

  Box3 box;
  box.lo.x = read_pod<double>(f.get());
  box.lo.y = read_pod<double>(f.get());
  box.lo.z = read_pod<double>(f.get());
  box.hi.x = read_pod<double>(f.get());
  box.hi.y = read_pod<double>(f.get());
  box.hi.z = read_pod<double>(f.get());
  std::uint32_t counts[3];
  for (auto& c : counts) c = read_pod<std::uint32_t>(f.get());
  Vec3 step;
  step.x = read_pod<double>(f.get());
  step.y = read_pod<double>(f.get());
  step.z = read_pod<double>(f.get());

  FieldFile out{VarianceField{SourceGrid(box, step, static_cast<int>(counts[0]),
                                         static_cast<int>(counts[1]),
                                         static_cast<int>(counts[2]))},
                std::move(echo)};
  out.field.max_imag_residue = read_pod<double>(f.get());
  out.field.skipped_points = static_cast<std::size_t>(read_pod<std::uint64_t>(f.get()));
  const std::size_t n = out.field.grid.num_cells();
  for (auto& arr : out.field.raw) {
    arr.resize(n);
    read_array(f.get(), arr.data(), n);
  }
  for (auto& arr : out.field.clamped) {
    arr.resize(n);
    read_array(f.get(), arr.data(), n);
  }
  return out;
}

}  // namespace ersi
