#pragma once

namespace rotstar {

// z-parity of an axisymmetric field.
enum class Parity { even, odd };

}  // namespace rotstar
