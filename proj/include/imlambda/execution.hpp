#pragma once

namespace imlambda {

// Selects the serial reference loop or the OpenMP loop for grid kernels.
// Both produce bit-identical results; points are independent and gathered in grid order.
enum class Execution { Serial, Parallel };

int max_threads();
void set_threads(int n);

} // namespace imlambda
