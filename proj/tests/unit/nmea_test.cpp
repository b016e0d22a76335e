#include <gtest/gtest.h>

#include <random>

#include "seampos/error.hpp"
#include "seampos/nmea.hpp"
#include "synthetic.hpp"

using namespace seampos;
using namespace std::chrono;

namespace {

const std::string kGga = "$GPGGA,123519,4807.038,N,01131.000,E,1,08,0.9,545.4,M,46.9,M,,*47";

std::optional<ErrorCode> code_of(std::string_view sentence) {
  try {
    parse_nmea(sentence);
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

std::string message_of(std::string_view sentence) {
  try {
    parse_nmea(sentence);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(NmeaChecksum, HandComputed) {
  EXPECT_EQ(nmea_checksum("GPGGA,123519,4807.038,N,01131.000,E,1,08,0.9,545.4,M,46.9,M,,"), 0x47);
  EXPECT_EQ(nmea_checksum(""), 0);
  EXPECT_EQ(nmea_checksum("A"), 0x41);
  EXPECT_EQ(nmea_checksum("AA"), 0);
}

TEST(ParseNmea, GgaWorkedExample) {
  const auto fix = parse_nmea(kGga);
  EXPECT_EQ(fix.talker, "GP");
  EXPECT_EQ(fix.type, "GGA");
  EXPECT_NEAR(fix.lat_deg, 48.0 + 7.038 / 60.0, 1e-12);
  EXPECT_NEAR(fix.lat_deg, 48.1173, 1e-9);
  EXPECT_NEAR(fix.lon_deg, 11.0 + 31.0 / 60.0, 1e-12);
  EXPECT_DOUBLE_EQ(fix.alt_m, 545.4);
  EXPECT_DOUBLE_EQ(fix.geoid_separation_m, 46.9);
  EXPECT_EQ(fix.num_satellites, 8);
  EXPECT_EQ(fix.fix_quality, 1);
  EXPECT_DOUBLE_EQ(fix.hdop, 0.9);
  EXPECT_EQ(fix.time_of_day_ns, (12LL * 3600 + 35 * 60 + 19) * 1'000'000'000LL);
  EXPECT_FALSE(fix.t.has_value());
  EXPECT_TRUE(fix.valid);
}

TEST(ParseNmea, DateTurnsTimeOfDayIntoUnixTime) {
  const auto fix = parse_nmea(kGga, year{2024} / January / 15);
  ASSERT_TRUE(fix.t.has_value());
  EXPECT_EQ(*fix.t, 1705322119LL * 1'000'000'000LL);
}

TEST(ParseNmea, Errors) {
  EXPECT_EQ(code_of("$GPGGA,123519,4807.038,N,01131.000,E,1,08,0.9,545.4,M,46.9,M,,*00"), ErrorCode::ChecksumMismatch);
  EXPECT_EQ(code_of("$GPGGA,123519,4807.038,N,01131.000,E,1,08,0.9,545.4,M,46.9,M,,"), ErrorCode::ChecksumMismatch);
  EXPECT_EQ(code_of("$GPXYZ,1,2*4F"), ErrorCode::UnsupportedSentence);
  EXPECT_EQ(code_of("GPXYZ,1,2*4F"), ErrorCode::MalformedField);
}

TEST(ParseNmea, MalformedFieldNamesTheIndex) {
  const std::string body = "GPGGA,123519,48x7.038,N,01131.000,E,1,08,0.9,545.4,M,46.9,M,,";
  char sum[4];
  std::snprintf(sum, sizeof sum, "%02X", nmea_checksum(body));
  const std::string sentence = "$" + body + "*" + sum;
  EXPECT_EQ(code_of(sentence), ErrorCode::MalformedField);
  EXPECT_NE(message_of(sentence).find("field 2"), std::string::npos) << message_of(sentence);

  const std::string body2 = "GPGGA,123519,4807.038,Q,01131.000,E,1,08,0.9,545.4,M,46.9,M,,";
  std::snprintf(sum, sizeof sum, "%02X", nmea_checksum(body2));
  EXPECT_NE(message_of("$" + body2 + "*" + sum).find("field 3"), std::string::npos);
}

TEST(ParseNmea, SouthernAndWesternHemispheres) {
  const auto fix = parse_nmea(synth::make_gga(0, -33.5, -70.25, 10.0));
  EXPECT_NEAR(fix.lat_deg, -33.5, 1e-9);
  EXPECT_NEAR(fix.lon_deg, -70.25, 1e-9);
}

TEST(ParseNmea, RmcCarriesDateAndSpeed) {
  const TimeNs t = synth::kEpoch + 730'000'000;
  const auto fix = parse_nmea(synth::make_rmc(t, 47.5, 8.5, 10.0));
  EXPECT_EQ(fix.type, "RMC");
  ASSERT_TRUE(fix.date.has_value());
  EXPECT_EQ(*fix.date, year{2024} / January / 15);
  ASSERT_TRUE(fix.t.has_value());
  EXPECT_EQ(*fix.t, t);
  ASSERT_TRUE(fix.speed_mps.has_value());
  EXPECT_NEAR(*fix.speed_mps, 10.0 * 1852.0 / 3600.0, 1e-12);
}

TEST(ParseNmea, GeneratedSentencesRoundTrip) {
  std::mt19937_64 rng(90);
  std::uniform_real_distribution<double> lat(-89.0, 89.0), lon(-179.0, 179.0), alt(-100.0, 3000.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = lat(rng), o = lon(rng), h = alt(rng);
    const TimeNs t = synth::kEpoch + static_cast<TimeNs>(rng() % 8'640'000) * 10'000'000LL;
    const auto fix = parse_nmea(synth::make_gga(t, a, o, h), year{2024} / January / 15);
    EXPECT_NEAR(fix.lat_deg, a, 1e-8);
    EXPECT_NEAR(fix.lon_deg, o, 1e-8);
    EXPECT_NEAR(fix.alt_m, h, 0.005);
  }
}

TEST(ParseNmea, SingleByteFlipsNeverPassTheChecksum) {
  std::mt19937_64 rng(91);
  const auto star = kGga.find('*');
  std::size_t accepted = 0;
  for (int i = 0; i < 20000; ++i) {
    std::string s = kGga;
    const std::size_t pos = 1 + rng() % (star - 1);
    const auto flip = static_cast<char>(1 + rng() % 255);
    s[pos] = static_cast<char>(s[pos] ^ flip);
    try {
      parse_nmea(s);
      ++accepted;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ChecksumMismatch) ++accepted;
    }
  }
  EXPECT_EQ(accepted, 0u);
}

TEST(NmeaDecoder, GgaUsesConfiguredDateUntilRmcArrives) {
  NmeaDecoder decoder(year{2020} / March / 1);
  const TimeNs t = synth::kEpoch + 2'000'000'000;
  auto records = decoder.feed(synth::make_gga(t, 47.0, 8.0, 400.0));
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].time() % (86400LL * 1'000'000'000LL), t % (86400LL * 1'000'000'000LL));
  EXPECT_NE(records[0].time(), t);

  records = decoder.feed(synth::make_rmc(t, 47.0, 8.0, 1.0) + "\r\n" + synth::make_gga(t, 47.0, 8.0, 400.0) +
                         "\r\n\r\n");
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].time(), t);
  const auto& loc = std::get<LocationReading>(records[0].payload());
  EXPECT_NEAR(loc.latitude, 47.0, 1e-8);
  EXPECT_NEAR(loc.speed, 1852.0 / 3600.0, 1e-12);
  EXPECT_DOUBLE_EQ(loc.horizontal_accuracy, 0.8 * 5.0);
  EXPECT_DOUBLE_EQ(loc.vertical_accuracy, 0.8 * 5.0 * 1.5);
}

TEST(NmeaDecoder, WithoutAnyDateTheFixIsRejected) {
  NmeaDecoder decoder;
  EXPECT_THROW(decoder.feed(kGga), Error);
}

TEST(NmeaDecoder, RmcOnlyProducesNoRecords) {
  NmeaDecoder decoder;
  EXPECT_TRUE(decoder.feed(synth::make_rmc(synth::kEpoch, 1, 2, 3)).empty());
}

TEST(CivilDate, ParseAndFormat) {
  EXPECT_EQ(parse_civil_date("2024-01-15"), year{2024} / January / 15);
  EXPECT_EQ(format_civil_date(year{2024} / January / 15), "2024-01-15");
  EXPECT_THROW(parse_civil_date("2024-02-30"), Error);
  EXPECT_THROW(parse_civil_date("20240115"), Error);
}
