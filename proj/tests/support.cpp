#include "lsl/fft.hpp"

// catch2 owns main; this runs before it
namespace {
[[maybe_unused]] const bool tuned = [] {
  lsl::tune_allocator();
  return true;
}();
}
