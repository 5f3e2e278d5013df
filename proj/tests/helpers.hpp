#pragma once

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "otbag/core.hpp"
#include "otbag/error.hpp"

namespace testutil {

// Runs f and reports the Error code it raised ("" if it did not throw).
template <typename F>
std::string error_code_of(F&& f) {
  try {
    f();
  } catch (const otbag::Error& e) {
    return e.code();
  } catch (...) {
    return "<non-otbag exception>";
  }
  return "";
}

inline std::vector<otbag::BinaryLabel> labels(std::initializer_list<int> values) {
  std::vector<otbag::BinaryLabel> out;
  for (int v : values) out.push_back(otbag::label_from_value(v));
  return out;
}

// Unique per-test scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    dir_ = std::filesystem::temp_directory_path() /
           ("otbag-test-" + tag + "-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter++));
    std::filesystem::create_directories(dir_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(dir_, ec);
  }
  std::filesystem::path path(const std::string& name) const {
    return dir_ / name;
  }

 private:
  std::filesystem::path dir_;
};

inline void write_file(const std::filesystem::path& path,
                       const std::string& content) {
  std::ofstream out(path);
  out << content;
}

}  // namespace testutil
