#pragma once

// Reference values computed with mpmath at 30 digits, independent of this library.

namespace oracle {

inline constexpr double kE1at1 = 0.21938393439552027;            // E_1(1)
inline constexpr double kEnNeg07at09 = 0.744215521173804952;     // E_{-0.7}(0.9)
inline constexpr double kErf010027 = 0.1127645388008999;         // erf(0.10027)
inline constexpr double kUpsilon500 = 0.100265130985240;         // υ at 500 m, a = 0.1 m
inline constexpr double kA0at500 = 0.0127146145571937;           // erf(υ)² at 500 m
inline constexpr double kGamma0at15dBm = 3.3620e10;              // 2 P_t² R² / σ_w²
inline constexpr double kZat1km = 0.331021341463415;             // 4.343 / 13.12
inline constexpr double kUpperGamma2at05 = 0.909795989568950;    // Γ(2, 0.5)
inline constexpr double kEq17n3k15 = 0.23717293533203098;        // ∫_1^∞ u^-3 Γ(1.5, 3 ln u) du
inline constexpr double kDiversityAt08 = 0.206888338414634;      // 2.1715 / (13.12 · 0.8)
inline constexpr double kEnMinus05at2 = 0.0819241726165294;      // E_{-0.5}(2)
inline constexpr double kEn35at03 = 0.252183798168079;           // E_{3.5}(0.3)
inline constexpr double kE2at05 = 0.326643862324553;             // E_2(0.5)
inline constexpr double kE1at1em3 = 6.33153936413615;            // E_1(1e-3)
inline constexpr double kUpperGammaHalfAt2 = 0.0806471179603177; // Γ(0.5, 2)
inline constexpr double kUpperGammaM15at07 = 0.333334344096612;  // Γ(-1.5, 0.7)
inline constexpr double kUpperGamma43at71 = 0.874101067665087;   // Γ(4.3, 7.1)
inline constexpr double kUpperGamma0at02 = 1.22265054418389;     // Γ(0, 0.2)
inline constexpr double kRayleighDistance = 120.830486676530509; // π (5 mm)² / 650 nm
inline constexpr double kRayleighMean028 = 0.350927958448340070; // 0.28 √(π/2)

}  // namespace oracle
