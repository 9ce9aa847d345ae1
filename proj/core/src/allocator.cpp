#include "orl/util/allocator.hpp"

#include <cstdlib>  // defines __GLIBC__ when applicable

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace orl {

void configure_allocator() noexcept {
#if defined(__GLIBC__)
  mallopt(M_MMAP_THRESHOLD, 32 * 1024 * 1024);
  mallopt(M_TRIM_THRESHOLD, 256 * 1024 * 1024);
#endif
}

}  // namespace orl
