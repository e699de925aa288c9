#pragma once

namespace sptb {

// Environment variable that overrides the default worker count.
inline constexpr const char* kWorkersEnv = "SPTB_WORKERS";

// Worker count used when a caller does not pass one: $SPTB_WORKERS if set
// and positive, otherwise the hardware concurrency.
int default_workers();

// Largest worker count the runtime will hand out.
int max_workers();

}  // namespace sptb
