#include "qmalsim/parallel.hpp"

#include <cstdlib>
#include <string>

namespace qmalsim {

int default_thread_count() {
  if (const char* env = std::getenv("QMALSIM_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (...) {
      // fall through to hardware default
    }
  }
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

}  // namespace qmalsim
