#pragma once

// Compile-time fault injection for mutation testing of the verification
// suite.  Production builds leave every flag false.

namespace ermakov::detail {

#ifdef ERMAKOV_MUTANT_DROP_QUANTUM_TERM
inline constexpr bool kDropQuantumTerm = true;
#else
inline constexpr bool kDropQuantumTerm = false;
#endif

#ifdef ERMAKOV_MUTANT_FORWARD_STENCIL
inline constexpr bool kForwardBetaStencil = true;
#else
inline constexpr bool kForwardBetaStencil = false;
#endif

#ifdef ERMAKOV_MUTANT_RADIATION_SIGN
inline constexpr bool kFlipRadiationSign = true;
#else
inline constexpr bool kFlipRadiationSign = false;
#endif

}  // namespace ermakov::detail
