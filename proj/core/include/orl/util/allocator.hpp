#pragma once

namespace orl {

/// Keeps large freed blocks on the heap instead of returning them to the OS.
/// Full-batch training allocates the same multi-megabyte temporaries every
/// step; with the default glibc thresholds each one is mapped and unmapped.
/// No-op on other C libraries. Call once from main().
void configure_allocator() noexcept;

}  // namespace orl
