#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ca3 {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad configuration or dimension mismatch; message names the offending field.
class ConfigError : public Error {
public:
    using Error::Error;
};

inline void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

// Dense row-major matrix. Weight matrices store non-negative magnitudes;
// the synapse sign is applied at use.
struct Mat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), a(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
    double* row(std::size_t i) { return a.data() + i * cols; }
    const double* row(std::size_t i) const { return a.data() + i * cols; }
    std::size_t size() const { return a.size(); }

    bool operator==(const Mat&) const = default;
};

} // namespace ca3
