#ifndef SALSA_POLARITY_H_
#define SALSA_POLARITY_H_

#include <array>
#include <optional>
#include <string_view>

namespace salsa {

enum class Polarity { kPositive, kNegative, kNeutral };

inline constexpr std::array<Polarity, 3> kAllPolarities = {
    Polarity::kPositive, Polarity::kNegative, Polarity::kNeutral};

constexpr std::string_view to_string(Polarity p) {
  switch (p) {
    case Polarity::kPositive:
      return "positive";
    case Polarity::kNegative:
      return "negative";
    case Polarity::kNeutral:
      return "neutral";
  }
  return "neutral";
}

constexpr std::optional<Polarity> parse_polarity(std::string_view s) {
  for (Polarity p : kAllPolarities) {
    if (to_string(p) == s) return p;
  }
  return std::nullopt;
}

// Positive iff valence > threshold, negative iff < -threshold; ties are
// neutral.
constexpr Polarity classify_valence(double valence, double threshold) {
  if (valence > threshold) return Polarity::kPositive;
  if (valence < -threshold) return Polarity::kNegative;
  return Polarity::kNeutral;
}

}  // namespace salsa

#endif  // SALSA_POLARITY_H_
