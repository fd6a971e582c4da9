#pragma once

// Independent re-implementations used as oracles. Nothing here may call into
// the code paths under test; plain doubles and hand-rolled algorithms only.

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tiprdc/common.hpp"
#include "tiprdc/tensor.hpp"

namespace tsup {

// Scalar Adam, written straight from the update equations.
struct ScalarAdam {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double decay = 1.0;
  long decay_every = 0;

  double m = 0.0;
  double v = 0.0;
  long t = 0;

  double step(double param, double grad) {
    double rate = lr;
    if (decay_every > 0) rate = lr * std::pow(decay, static_cast<double>(t / decay_every));
    ++t;
    m = beta1 * m + (1.0 - beta1) * grad;
    v = beta2 * v + (1.0 - beta2) * grad * grad;
    double mhat = m / (1.0 - std::pow(beta1, static_cast<double>(t)));
    double vhat = v / (1.0 - std::pow(beta2, static_cast<double>(t)));
    return param - rate * mhat / (std::sqrt(vhat) + eps);
  }
};

// Cyclic Jacobi eigenvalues of a symmetric matrix, descending. Slow and
// simple on purpose; it shares no code with the eigensolver under test.
inline std::vector<double> jacobi_eigenvalues(tiprdc::Matrix A) {
  const auto n = A.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (tiprdc::Index p = 0; p < n; ++p)
      for (tiprdc::Index q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
    if (off < 1e-24) break;
    for (tiprdc::Index p = 0; p < n; ++p) {
      for (tiprdc::Index q = p + 1; q < n; ++q) {
        if (std::abs(A(p, q)) < 1e-300) continue;
        double theta = (A(q, q) - A(p, p)) / (2.0 * A(p, q));
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (tiprdc::Index k = 0; k < n; ++k) {
          double akp = A(k, p), akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (tiprdc::Index k = 0; k < n; ++k) {
          double apk = A(p, k), aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(static_cast<std::size_t>(n));
  for (tiprdc::Index i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = A(i, i);
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

// Raw bytes of every parameter value, for bitwise change detection.
inline std::string param_bytes(const std::vector<tiprdc::Tensor>& params) {
  std::string out;
  for (const auto& p : params) {
    const tiprdc::Matrix& v = p.value();
    out.append(reinterpret_cast<const char*>(v.data()),
               static_cast<std::size_t>(v.size()) * sizeof(double));
  }
  return out;
}

inline bool bitwise_equal(const tiprdc::Matrix& a, const tiprdc::Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return std::memcmp(a.data(), b.data(),
                     static_cast<std::size_t>(a.size()) * sizeof(double)) == 0;
}

inline double sample_mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("tiprdc_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace tsup
