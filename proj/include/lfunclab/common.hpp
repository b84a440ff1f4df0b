#ifndef LFUNCLAB_COMMON_HPP
#define LFUNCLAB_COMMON_HPP

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace lfl {

using cplx = std::complex<double>;

// Failure categories shared by the whole library; the C layer maps these
// one-to-one onto its status codes.
enum class Status : int {
  ok = 0,
  domain_error = 1,        // argument outside an operation's documented domain
  resource_error = 2,      // cache bound / size limit exceeded
  branch_error = 3,        // logarithm branch cannot be tracked unambiguously
  coverage_error = 4,      // requested region not covered by certified data
  certification_error = 5, // zero counts disagree between independent methods
  singular_error = 6,      // value undefined (pole, empty sum, zero divisor)
  io_error = 7,            // file read/write failure
  invalid_argument = 8,    // malformed descriptor, bad grid, null handle
  unsupported = 9,         // operation not defined for this instance
  internal_error = 10,
};

class Error : public std::runtime_error {
public:
  Error(Status s, const std::string& what) : std::runtime_error(what), status_(s) {}
  Status status() const noexcept { return status_; }

private:
  Status status_;
};

[[noreturn]] inline void fail(Status s, const std::string& what) { throw Error(s, what); }

const char* status_name(Status s) noexcept;

// Compensated accumulator. Scans and prime sums add ~1e7 terms; plain
// left-to-right summation would cost several digits at that length.
struct Kahan {
  double sum = 0.0;
  double c = 0.0;
  void add(double x) noexcept {
    double y = x - c;
    double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  double value() const noexcept { return sum; }
};

struct KahanC {
  Kahan re, im;
  void add(const cplx& z) noexcept {
    re.add(z.real());
    im.add(z.imag());
  }
  cplx value() const noexcept { return {re.value(), im.value()}; }
};

// Runs fn(i) for i in [0, n) on `jobs` threads (0 = hardware concurrency).
// Results are written by index by the caller, so the output order never
// depends on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, unsigned jobs = 0);

unsigned effective_jobs(unsigned jobs) noexcept;

} // namespace lfl

#endif
