#pragma once

#include "plf/errors.hpp"
#include "plf/forecast.hpp"
#include "plf/series.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>

#include <unistd.h>

namespace plf::test {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("plf_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

/// Code of the plf::Error thrown by f, or nullopt when it returns normally.
template <class F>
std::optional<Errc> thrown_code(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

/// Rows of sorted uniform draws around `center`.
inline QuantileForecast random_forecast(std::mt19937_64& rng, Timestamp start, std::size_t hours, double center,
                                        double spread) {
  std::uniform_real_distribution<double> u(-spread, spread);
  QuantileForecast f(start, hours);
  for (std::size_t h = 0; h < hours; ++h) {
    auto row = f.row(h);
    for (auto& v : row) v = center + u(rng);
    std::sort(row.begin(), row.end());
  }
  return f;
}

}  // namespace plf::test
