#pragma once

namespace nrpinn::util {

/// Keeps freed blocks in the heap instead of returning them to the OS. The kernels allocate
/// and free the same few hundred KB per block every iteration; with the default glibc
/// thresholds each of those becomes an mmap/munmap pair and page faults dominate.
/// No-op on other C libraries. Call once at program start.
void configure_allocator();

}  // namespace nrpinn::util
