#pragma once

#include <cstddef>

namespace ammhl {

// Worker count for the OpenMP kernels. Initialised from AMMHL_THREADS on first
// use; 0 or unset means the OpenMP default.
int thread_count();
void set_thread_count(int n);

// Execution policy for the path kernels. `serial` is the reference
// implementation the parallel drivers are tested against.
enum class Exec { serial, parallel };

}  // namespace ammhl
