#pragma once

#include <cstddef>
#include <functional>

namespace fatoulab {

void set_thread_count(unsigned n);
[[nodiscard]] unsigned thread_count();

// Calls body(i) for i in [0, n). Each index must write only its own output slot;
// work is split into fixed contiguous chunks so results never depend on timing.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace fatoulab
