#include "lmk/parallel.hpp"

#include <cstdlib>
#include <string>

namespace lmk {

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("LMK_THREADS")) {
    try {
      const unsigned long value = std::stoul(env);
      if (value > 0 && value < 4096) return static_cast<unsigned>(value);
    } catch (const std::exception&) {
      // fall through to the default
    }
  }
  return 1;
}

}  // namespace lmk
