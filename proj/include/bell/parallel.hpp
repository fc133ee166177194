#pragma once

namespace bell {

/// Chooses between the OpenMP kernel and its serial reference. Both produce
/// identical results; the serial path exists for testing and benchmarking.
enum class Exec { serial, parallel };

/// OpenMP worker count, capped by the BELL_LAB_THREADS environment variable
/// when it holds a positive integer.
int worker_count();

}  // namespace bell
