#include "lfunclab/common.hpp"

#include <atomic>
#include <mutex>

namespace lfl {

const char* status_name(Status s) noexcept {
  switch (s) {
    case Status::ok: return "ok";
    case Status::domain_error: return "domain_error";
    case Status::resource_error: return "resource_error";
    case Status::branch_error: return "branch_error";
    case Status::coverage_error: return "coverage_error";
    case Status::certification_error: return "certification_error";
    case Status::singular_error: return "singular_error";
    case Status::io_error: return "io_error";
    case Status::invalid_argument: return "invalid_argument";
    case Status::unsupported: return "unsupported";
    case Status::internal_error: return "internal_error";
  }
  return "unknown";
}

unsigned effective_jobs(unsigned jobs) noexcept {
  if (jobs != 0) return jobs;
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, unsigned jobs) {
  if (n == 0) return;
  unsigned nthreads = effective_jobs(jobs);
  if (nthreads > n) nthreads = static_cast<unsigned>(n);
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex err_mutex;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

} // namespace lfl
