#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "seampos/schema.hpp"

namespace seampos {

/// XOR of every byte in `body` (the characters between '$' and '*').
std::uint8_t nmea_checksum(std::string_view body);

/// Position fix decoded from a GGA sentence, or position/speed/date from RMC.
struct NmeaFix {
  std::string talker;  // "GP", "GN", ...
  std::string type;    // "GGA" or "RMC"
  double lat_deg = 0.0;
  double lon_deg = 0.0;
  double alt_m = 0.0;  // above mean sea level (GGA)
  double geoid_separation_m = 0.0;
  int fix_quality = 0;
  int num_satellites = 0;
  double hdop = 0.0;
  std::optional<double> speed_mps;  // RMC
  std::optional<double> course_deg;  // RMC
  std::optional<std::chrono::year_month_day> date;  // RMC
  std::int64_t time_of_day_ns = 0;
  std::optional<TimeNs> t;  // when a date is known
  bool valid = true;  // RMC status 'A' / GGA quality > 0
};

/// Parses one GGA or RMC sentence. The checksum is verified before any
/// field is read. `date` supplies the calendar day for GGA timestamps.
/// Throws ChecksumMismatch, UnsupportedSentence or MalformedField (the
/// message names the field index).
NmeaFix parse_nmea(std::string_view sentence, std::optional<std::chrono::year_month_day> date = std::nullopt);

/// Stateful decoder for one receiver: RMC sentences update the date and
/// speed, GGA sentences become Location records.
class NmeaDecoder {
 public:
  explicit NmeaDecoder(std::optional<std::chrono::year_month_day> default_date = std::nullopt)
      : date_(default_date) {}

  /// Decodes every non-empty line of `text`.
  std::vector<StandardizedRecord> feed(std::string_view text);

  /// Location record for a GGA fix. Accuracies are derived from HDOP.
  StandardizedRecord to_record(const NmeaFix& fix) const;

 private:
  std::optional<std::chrono::year_month_day> date_;
  double speed_mps_ = 0.0;
};

/// Parses "YYYY-MM-DD".
std::chrono::year_month_day parse_civil_date(std::string_view text);
std::string format_civil_date(const std::chrono::year_month_day& date);

}  // namespace seampos
