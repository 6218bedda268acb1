#pragma once

// Published critical values and the tail mass they carry. The (df, t) and
// (d1, d2, F) pairs are the standard table entries at full precision; the
// incomplete-beta rows were evaluated at 40 digits.

#include <array>

namespace special_points {

struct TPoint {
    double df, t, p;
};
struct FPoint {
    double d1, d2, f, p;
};
struct BetaPoint {
    double a, b, x, value;
};

inline constexpr std::array<TPoint, 10> kStudentT{{
    {1, 12.706204736432102, 0.05},
    {2, 4.302652729696144, 0.05},
    {5, 2.5705818356363146, 0.05},
    {10, 2.2281388519649385, 0.05},
    {20, 2.085963447265837, 0.05},
    {30, 2.7499956535670305, 0.01},
    {60, 2.660283028855037, 0.01},
    {120, 2.6174211451068654, 0.01},
    {8, 1.8595480375228428, 0.10},
    {15, 4.072765195903791, 0.001},
}};

inline constexpr std::array<FPoint, 7> kFisherF{{
    {1, 10, 4.9646027437307145, 0.05},
    {1, 20, 8.09595806408569, 0.01},
    {2, 20, 3.492828476735632, 0.05},
    {3, 30, 2.9222771906450378, 0.05},
    {5, 30, 3.6990188114125706, 0.01},
    {1, 100, 3.9361429863126487, 0.05},
    {4, 12, 3.259166726901249, 0.05},
}};

inline constexpr std::array<BetaPoint, 3> kIncompleteBeta{{
    {2, 3, 0.4, 0.5248},
    {0.5, 0.5, 0.3, 0.36901011956554538},
    {5, 1.5, 0.9, 0.77617213431621567},
}};

} // namespace special_points
