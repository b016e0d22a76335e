#include "seampos/nmea.hpp"

#include <charconv>
#include <cmath>

#include "seampos/error.hpp"

namespace seampos {

namespace {

using std::chrono::year_month_day;

constexpr double kKnotsToMps = 1852.0 / 3600.0;
/// Range error per unit of HDOP used to express fix accuracy in metres.
constexpr double kUereMetres = 5.0;

[[noreturn]] void malformed(std::size_t index, const std::string& what) {
  throw Error(ErrorCode::MalformedField, "field " + std::to_string(index) + ": " + what);
}

std::vector<std::string_view> split_fields(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

double number(const std::vector<std::string_view>& f, std::size_t i, const char* what) {
  if (i >= f.size() || f[i].empty()) malformed(i, std::string(what) + " is empty");
  double v = 0.0;
  const auto* end = f[i].data() + f[i].size();
  auto [ptr, ec] = std::from_chars(f[i].data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) malformed(i, std::string(what) + " is not a number");
  return v;
}

int integer(const std::vector<std::string_view>& f, std::size_t i, const char* what) {
  if (i >= f.size() || f[i].empty()) malformed(i, std::string(what) + " is empty");
  int v = 0;
  const auto* end = f[i].data() + f[i].size();
  auto [ptr, ec] = std::from_chars(f[i].data(), end, v);
  if (ec != std::errc() || ptr != end) malformed(i, std::string(what) + " is not an integer");
  return v;
}

int digits(std::string_view s, std::size_t pos, std::size_t n, std::size_t field) {
  int v = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const char c = s[pos + k];
    if (c < '0' || c > '9') malformed(field, "expected digits");
    v = v * 10 + (c - '0');
  }
  return v;
}

/// ddmm.mmmm / dddmm.mmmm with hemisphere letter.
double angle(const std::vector<std::string_view>& f, std::size_t i, int degree_digits, char positive, char negative) {
  if (i >= f.size() || f[i].size() < static_cast<std::size_t>(degree_digits) + 2) malformed(i, "coordinate too short");
  const int degrees = digits(f[i], 0, static_cast<std::size_t>(degree_digits), i);
  double minutes = 0.0;
  const auto rest = f[i].substr(static_cast<std::size_t>(degree_digits));
  auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), minutes);
  if (ec != std::errc() || ptr != rest.data() + rest.size() || minutes < 0.0 || minutes >= 60.0) {
    malformed(i, "bad minutes");
  }
  const double value = degrees + minutes / 60.0;
  if (i + 1 >= f.size() || f[i + 1].size() != 1) malformed(i + 1, "hemisphere missing");
  if (f[i + 1][0] == positive) return value;
  if (f[i + 1][0] == negative) return -value;
  malformed(i + 1, "bad hemisphere");
}

std::int64_t time_of_day(const std::vector<std::string_view>& f, std::size_t i) {
  if (i >= f.size() || f[i].size() < 6) malformed(i, "time must be hhmmss[.sss]");
  const int hh = digits(f[i], 0, 2, i);
  const int mm = digits(f[i], 2, 2, i);
  double ss = 0.0;
  const auto rest = f[i].substr(4);
  auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), ss);
  if (ec != std::errc() || ptr != rest.data() + rest.size() || hh > 23 || mm > 59 || ss < 0.0 || ss >= 61.0) {
    malformed(i, "time out of range");
  }
  return (static_cast<std::int64_t>(hh) * 3600 + mm * 60) * 1'000'000'000LL + std::llround(ss * 1e9);
}

TimeNs to_unix_ns(const year_month_day& date, std::int64_t tod_ns) {
  const auto days = std::chrono::sys_days(date).time_since_epoch().count();
  return static_cast<TimeNs>(days) * 86'400'000'000'000LL + tod_ns;
}

}  // namespace

std::uint8_t nmea_checksum(std::string_view body) {
  std::uint8_t sum = 0;
  for (char c : body) sum ^= static_cast<std::uint8_t>(c);
  return sum;
}

NmeaFix parse_nmea(std::string_view sentence, std::optional<year_month_day> date) {
  while (!sentence.empty() && (sentence.back() == '\r' || sentence.back() == '\n')) sentence.remove_suffix(1);
  if (sentence.empty() || sentence.front() != '$') malformed(0, "sentence must start with '$'");
  const auto star = sentence.find('*');
  if (star == std::string_view::npos || star + 3 != sentence.size() || sentence.find('*', star + 1) != std::string_view::npos) {
    throw Error(ErrorCode::ChecksumMismatch, "sentence must end with '*' and two hex digits");
  }
  const int hi = hex_value(sentence[star + 1]);
  const int lo = hex_value(sentence[star + 2]);
  const std::string_view body = sentence.substr(1, star - 1);
  if (hi < 0 || lo < 0 || nmea_checksum(body) != static_cast<std::uint8_t>(hi * 16 + lo)) {
    throw Error(ErrorCode::ChecksumMismatch, "checksum does not match");
  }

  const auto f = split_fields(body);
  if (f[0].size() != 5) throw Error(ErrorCode::UnsupportedSentence, "unknown sentence '" + std::string(f[0]) + "'");
  NmeaFix fix;
  fix.talker = std::string(f[0].substr(0, 2));
  fix.type = std::string(f[0].substr(2));

  if (fix.type == "GGA") {
    if (f.size() < 14) malformed(f.size(), "GGA needs 14 fields");
    fix.time_of_day_ns = time_of_day(f, 1);
    fix.lat_deg = angle(f, 2, 2, 'N', 'S');
    fix.lon_deg = angle(f, 4, 3, 'E', 'W');
    fix.fix_quality = integer(f, 6, "fix quality");
    fix.num_satellites = integer(f, 7, "satellite count");
    fix.hdop = number(f, 8, "hdop");
    fix.alt_m = number(f, 9, "altitude");
    if (!f[11].empty()) fix.geoid_separation_m = number(f, 11, "geoid separation");
    fix.valid = fix.fix_quality > 0;
    fix.date = date;
  } else if (fix.type == "RMC") {
    if (f.size() < 10) malformed(f.size(), "RMC needs 10 fields");
    fix.time_of_day_ns = time_of_day(f, 1);
    if (f[2] != "A" && f[2] != "V") malformed(2, "status must be A or V");
    fix.valid = f[2] == "A";
    fix.lat_deg = angle(f, 3, 2, 'N', 'S');
    fix.lon_deg = angle(f, 5, 3, 'E', 'W');
    fix.speed_mps = number(f, 7, "speed") * kKnotsToMps;
    if (!f[8].empty()) fix.course_deg = number(f, 8, "course");
    if (f[9].size() != 6) malformed(9, "date must be ddmmyy");
    const int dd = digits(f[9], 0, 2, 9);
    const int mo = digits(f[9], 2, 2, 9);
    const int yy = digits(f[9], 4, 2, 9);
    const year_month_day ymd{std::chrono::year(yy < 80 ? 2000 + yy : 1900 + yy),
                             std::chrono::month(static_cast<unsigned>(mo)), std::chrono::day(static_cast<unsigned>(dd))};
    if (!ymd.ok()) malformed(9, "invalid date");
    fix.date = ymd;
  } else {
    throw Error(ErrorCode::UnsupportedSentence, "unsupported sentence type '" + fix.type + "'");
  }
  if (fix.date) fix.t = to_unix_ns(*fix.date, fix.time_of_day_ns);
  return fix;
}

StandardizedRecord NmeaDecoder::to_record(const NmeaFix& fix) const {
  if (!fix.t) throw Error(ErrorCode::MalformedField, "field 1: no date known for the fix time");
  LocationReading loc;
  loc.latitude = fix.lat_deg;
  loc.longitude = fix.lon_deg;
  loc.altitude = fix.alt_m;
  loc.speed = fix.speed_mps.value_or(speed_mps_);
  loc.speed_accuracy = 0.0;
  loc.horizontal_accuracy = fix.hdop * kUereMetres;
  loc.vertical_accuracy = 1.5 * loc.horizontal_accuracy;
  return StandardizedRecord::make(SensorKind::Location, *fix.t, loc);
}

std::vector<StandardizedRecord> NmeaDecoder::feed(std::string_view text) {
  std::vector<StandardizedRecord> out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
    if (line.empty()) continue;

    const NmeaFix fix = parse_nmea(line, date_);
    if (fix.type == "RMC") {
      date_ = fix.date;
      if (fix.speed_mps) speed_mps_ = *fix.speed_mps;
    } else if (fix.valid) {
      out.push_back(to_record(fix));
    }
  }
  return out;
}

std::chrono::year_month_day parse_civil_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw Error(ErrorCode::InvalidConfig, "date must be YYYY-MM-DD: " + std::string(text));
  }
  int y = 0;
  unsigned m = 0, d = 0;
  std::from_chars(text.data(), text.data() + 4, y);
  std::from_chars(text.data() + 5, text.data() + 7, m);
  std::from_chars(text.data() + 8, text.data() + 10, d);
  const year_month_day ymd{std::chrono::year(y), std::chrono::month(m), std::chrono::day(d)};
  if (!ymd.ok()) throw Error(ErrorCode::InvalidConfig, "invalid date: " + std::string(text));
  return ymd;
}

std::string format_civil_date(const std::chrono::year_month_day& date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()), static_cast<unsigned>(date.month()),
                static_cast<unsigned>(date.day()));
  return buf;
}

}  // namespace seampos
