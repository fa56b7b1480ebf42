#include "ammhl/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

#include "ammhl/errors.hpp"

namespace ammhl {

namespace {

int initial_threads() {
  if (const char* env = std::getenv("AMMHL_THREADS"); env && *env) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return omp_get_max_threads();
}

int& threads_slot() {
  static int n = initial_threads();
  return n;
}

}  // namespace

int thread_count() { return threads_slot(); }

void set_thread_count(int n) {
  threads_slot() = n > 0 ? n : omp_get_max_threads();
}

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::insufficient: return "insufficient_reserves";
    case ErrorKind::capability: return "capability";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::consistency: return "consistency";
    case ErrorKind::shape: return "shape";
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace ammhl
