#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#ifndef MMDP_TEST_DATA
#error "MMDP_TEST_DATA must point at tests/data"
#endif

namespace fixture {

inline std::filesystem::path data_dir() { return MMDP_TEST_DATA; }
inline std::filesystem::path e1_dir() { return data_dir() / "e1"; }

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  static std::mt19937_64 rng(std::random_device{}());
  auto dir = std::filesystem::temp_directory_path() / ("mmdp-test-" + name + "-" + std::to_string(rng()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Copy of the E1 fixture that a test may edit.
inline std::filesystem::path e1_copy(const std::string& name) {
  auto dir = scratch_dir(name);
  for (const auto& entry : std::filesystem::directory_iterator(e1_dir())) {
    std::filesystem::copy_file(entry.path(), dir / entry.path().filename());
  }
  return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace fixture
