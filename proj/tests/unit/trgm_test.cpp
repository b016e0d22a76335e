#include <gtest/gtest.h>

#include <algorithm>

#include "seampos/jsonpath.hpp"
#include "seampos/trgm.hpp"
#include "seampos/validation.hpp"
#include "synthetic.hpp"

using namespace seampos;

namespace {

constexpr TimeNs kT = 1705307400000000000LL;

Document accel_example_input() {
  return Document::parse(R"({"sensor_data":{"Accelerometer":{"timestamp":1705307400,"x":0.11,"y":-0.27,"z":9.79}}})");
}

StandardizedDataset accel_example_output() {
  return StandardizedDataset::from_documents(Document::parse(
      R"([{"name":"Accelerometer","time":1705307400000000000,"values":{"x":0.11,"y":-0.27,"z":9.79}}])"));
}

bool has_rule(const std::vector<TransformationRule>& rules, const std::string& in, const std::string& out) {
  return std::any_of(rules.begin(), rules.end(),
                     [&](const TransformationRule& r) { return r.input_path == in && r.output_path == out; });
}

}  // namespace

TEST(ValueMatch, Examples) {
  EXPECT_EQ(value_match(Document(1705307400), Document(kT)).kind, MatchKind::Timestamp);
  const auto unit = value_match(Document(1.0), Document(9.80665));
  EXPECT_EQ(unit.kind, MatchKind::Unit);
  ASSERT_TRUE(unit.conversion);
  EXPECT_EQ(unit.conversion->unit, "g");
  EXPECT_EQ(value_match(Document(5), Document(5)).kind, MatchKind::Exact);
  EXPECT_EQ(value_match(Document("a"), Document("b")).kind, MatchKind::None);
  EXPECT_EQ(value_match(Document(2.0), Document(3.0)).kind, MatchKind::None);
}

TEST(ValueMatch, PrecedenceExactBeforeUnit) {
  EXPECT_EQ(value_match(Document(0.0), Document(0.0)).kind, MatchKind::Exact);
  const auto restricted = value_match(Document(100.0), Document(1.0), Quantity::Length);
  EXPECT_EQ(restricted.kind, MatchKind::Unit);
  EXPECT_EQ(restricted.conversion->unit, "cm");
  EXPECT_EQ(value_match(Document(100.0), Document(1.0), Quantity::Acceleration).conversion->unit, "cm/s^2");
  EXPECT_EQ(value_match(Document(100.0), Document(1.0), Quantity::AngularRate).kind, MatchKind::None);
}

TEST(DeriveRules, AccelerometerExample) {
  const auto rules = derive_rules(accel_example_input(), accel_example_output());
  EXPECT_TRUE(has_rule(rules, "$.sensor_data.Accelerometer.timestamp", "$[?(@.name == 'Accelerometer')].time"));
  EXPECT_TRUE(has_rule(rules, "$.sensor_data.Accelerometer.x", "$[?(@.name == 'Accelerometer')].values.x"));
  EXPECT_EQ(rules.size(), 4u);
}

TEST(DeriveRules, SelfMappingUsesIndexPaths) {
  const auto out = accel_example_output();
  const auto rules = derive_rules(out.to_document(), out);
  EXPECT_TRUE(has_rule(rules, "$[0].time", "$[?(@.name == 'Accelerometer')].time"));
  EXPECT_TRUE(has_rule(rules, "$[0].values.z", "$[?(@.name == 'Accelerometer')].values.z"));
}

TEST(DeriveRules, UnmatchedLeafIsNamed) {
  const Document input = Document::parse(R"({"sensor_data":{"Accelerometer":{"timestamp":1705307400,"x":0.11,"y":-0.27}}})");
  const auto out = StandardizedDataset::from_documents(Document::parse(
      R"([{"name":"Accelerometer","time":1705307400000000000,"values":{"x":0.11,"y":-0.27,"z":9.8}}])"));
  try {
    (void)derive_rules(input, out);
    ADD_FAILURE();
  } catch (const UnmatchedLeafError& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnmatchedLeaf);
    EXPECT_EQ(e.leaves(), std::vector<std::string>{"$[?(@.name == 'Accelerometer')].values.z"});
  }
}

TEST(DeriveRules, RepeatedKindIsUnsupported) {
  const auto out = StandardizedDataset::from_documents(Document::parse(R"([
    {"name":"Pedometer","time":1705307400000000000,"steps":1},
    {"name":"Pedometer","time":1705307401000000000,"steps":2}])"));
  try {
    (void)derive_rules(out.to_document(), out);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedOutputShape);
  }
}

TEST(DeriveRules, UnitAndTimestampPostOps) {
  const Document input = Document::parse(R"({"imu":{"t":"2024-01-15T08:30:00Z","ax":1.0,"ay":-0.5,"az":2.0,"unit":"g"}})");
  const auto out = StandardizedDataset::from_documents(Document::parse(
      R"([{"name":"Accelerometer","time":1705307400000000000,"values":{"x":9.80665,"y":-4.903325,"z":19.6133}}])"));
  const auto script = derive_transformation_script(input, out);
  EXPECT_EQ(script.rules.size(), 4u);
  ASSERT_EQ(script.post_ops.size(), 4u);
  EXPECT_EQ(script.post_ops[0].op, PostOpKind::NormalizeTimestamp);
  EXPECT_EQ(script.post_ops[1].op, PostOpKind::CoerceUnit);
  EXPECT_EQ(script.post_ops[1].unit, "g");
  const auto applied = apply_script(script, input);
  EXPECT_TRUE(compare_output(applied.records, out.to_document()).valid());
}

TEST(ApplyScript, AccelerometerExampleRule) {
  TransformationScript script;
  script.rules.push_back(
      TransformationRule::make("$.sensor_data.Accelerometer.timestamp", "$[?(@.name == 'Accelerometer')].time"));
  const auto out = apply_script(script, accel_example_input());
  EXPECT_EQ(out.records, Document::parse(R"([{"name":"Accelerometer","time":1705307400}])"));
  EXPECT_TRUE(out.issues.empty());
}

TEST(ApplyScript, EmptyScriptGivesEmptyDataset) {
  const auto out = apply_script(TransformationScript{}, accel_example_input());
  EXPECT_EQ(out.records, Document::array());
}

TEST(ApplyScript, LastWriteWins) {
  TransformationScript script;
  script.rules.push_back(TransformationRule::make("$.a", "$[?(@.name == 'Pedometer')].steps"));
  script.rules.push_back(TransformationRule::make("$.b", "$[?(@.name == 'Pedometer')].steps"));
  const auto out = apply_script(script, Document::parse(R"({"a":1,"b":2})"));
  EXPECT_EQ(out.records, Document::parse(R"([{"name":"Pedometer","steps":2}])"));
}

TEST(ApplyScript, MissingSourceAndMultipleMatchesAreReported) {
  TransformationScript script;
  script.rules.push_back(TransformationRule::make("$.nope", "$[?(@.name == 'Pedometer')].time"));
  script.rules.push_back(TransformationRule::make("$.list[*]", "$[?(@.name == 'Pedometer')].steps"));
  const Document input = Document::parse(R"({"list":[4,5]})");
  const Document copy = input;
  const auto out = apply_script(script, input);
  EXPECT_EQ(input, copy);
  ASSERT_EQ(out.issues.size(), 2u);
  EXPECT_EQ(out.issues[0].kind, ScriptIssueKind::RuleSourceMissing);
  EXPECT_EQ(out.issues[1].kind, ScriptIssueKind::MultipleMatches);
  EXPECT_TRUE(out.source_missing());
  EXPECT_EQ(out.records, Document::parse(R"([{"name":"Pedometer","steps":4}])"));
}

TEST(TransformationRule, OutputPathMustBeSettable) {
  EXPECT_THROW(TransformationRule::make("$.a", "$[*].time"), Error);
  EXPECT_THROW(TransformationRule::make("$.a[", "$.b"), Error);
}

TEST(TransformationScript, DocumentRoundTrip) {
  const auto pair = synth::make_example_pair(3, 1);
  const auto script = derive_transformation_script(pair.input, pair.output);
  const Document doc = script.to_document();
  EXPECT_TRUE(doc.contains("rules"));
  EXPECT_TRUE(doc["rules"][0].contains("inputPath"));
  EXPECT_EQ(TransformationScript::from_document(doc), script);
  EXPECT_THROW(TransformationScript::from_document(Document::parse(R"({"rules":[{"inputPath":"$.a"}]})")), Error);
}

TEST(ValidateScript, CorrectScriptConvergesOnFirstIteration) {
  const auto script = derive_transformation_script(accel_example_input(), accel_example_output());
  const auto result = validate_script(script, accel_example_input(), accel_example_output());
  EXPECT_TRUE(result.converged);
  EXPECT_EQ(result.iterations_used, 1);
  EXPECT_EQ(result.script, script);
}

TEST(ValidateScript, MissingRuleIsRederived) {
  for (int variant = 0; variant < 24; ++variant) {
    const auto pair = synth::make_example_pair(variant, 5);
    const auto good = derive_transformation_script(pair.input, pair.output);
    for (std::size_t drop = 0; drop < good.rules.size(); ++drop) {
      auto broken = good;
      broken.rules.erase(broken.rules.begin() + static_cast<std::ptrdiff_t>(drop));
      const auto result = validate_script(broken, pair.input, pair.output);
      EXPECT_TRUE(result.converged) << "variant " << variant << " drop " << drop;
      EXPECT_EQ(result.iterations_used, 2);
      EXPECT_TRUE(semantic_equal(apply_script(result.script, pair.input).records, apply_script(good, pair.input).records));
    }
  }
}

TEST(ValidateScript, WrongRuleIsRepaired) {
  auto script = derive_transformation_script(accel_example_input(), accel_example_output());
  script.rules[1].input_path = "$.sensor_data.Accelerometer.y";
  const auto result = validate_script(script, accel_example_input(), accel_example_output());
  EXPECT_TRUE(result.converged);
  EXPECT_EQ(result.iterations_used, 2);
}

TEST(ValidateScript, UnmatchableLeafFailsAtTheCap) {
  const Document input = Document::parse(R"({"p":{"t":1705307400,"x":0.11,"y":-0.27}})");
  const auto out = StandardizedDataset::from_documents(Document::parse(
      R"([{"name":"Gyroscope","time":1705307400000000000,"values":{"x":0.11,"y":-0.27,"z":9.8}}])"));
  const auto derivation = derive_script(input, out);
  ASSERT_EQ(derivation.unmatched.size(), 1u);
  for (int cap : {1, 3, 5}) {
    const auto result = validate_script(derivation.script, input, out, cap);
    EXPECT_FALSE(result.converged);
    EXPECT_EQ(result.iterations_used, cap);
    ASSERT_FALSE(result.report.valid());
    EXPECT_EQ(result.report.mismatches[0].path, "$[?(@.name == 'Gyroscope')].values.z");
    EXPECT_EQ(result.report.mismatches[0].kind, MismatchKind::MissingLeaf);
  }
}

TEST(CompareOutput, KindsOfMismatch) {
  const Document expected = Document::parse(R"([{"name":"Pedometer","time":1705307400000000000,"steps":4}])");
  EXPECT_TRUE(compare_output(expected, expected).valid());
  const auto differs = compare_output(Document::parse(R"([{"name":"Pedometer","time":1705307400000000000,"steps":5}])"),
                                      expected);
  ASSERT_EQ(differs.mismatches.size(), 1u);
  EXPECT_EQ(differs.mismatches[0].kind, MismatchKind::ValueDiffers);
  const auto extra = compare_output(
      Document::parse(R"([{"name":"Pedometer","time":1705307400000000000,"steps":4,"cadence":1}])"), expected);
  ASSERT_EQ(extra.mismatches.size(), 1u);
  EXPECT_EQ(extra.mismatches[0].kind, MismatchKind::UnexpectedLeaf);
  const auto close = compare_output(
      Document::parse(R"([{"name":"Barometer","time":1,"values":{"relative_altitude":1.0000000000001,"pressure":2}}])"),
      Document::parse(R"([{"name":"Barometer","time":1,"values":{"relative_altitude":1.0,"pressure":2}}])"));
  EXPECT_TRUE(close.valid());
}

// Round trip and portability over generated pairs covering every kind.
TEST(TrgmProperties, RoundTripAndPortabilityOverGeneratedPairs) {
  std::set<SensorKind> covered;
  for (int variant = 0; variant < 24; ++variant) {
    const auto pair = synth::make_example_pair(variant, 100 + static_cast<std::uint64_t>(variant));
    covered.insert(pair.kinds.begin(), pair.kinds.end());
    ASSERT_TRUE(validate_dataset(pair.output.to_document()).valid());
    const Document input_copy = pair.input;
    const auto derivation = derive_script(pair.input, pair.output);
    ASSERT_TRUE(derivation.unmatched.empty()) << "variant " << variant << ": " << derivation.unmatched.front();
    EXPECT_EQ(pair.input, input_copy);
    const auto first = validate_script(derivation.script, pair.input, pair.output);
    EXPECT_TRUE(first.converged) << "variant " << variant << " " << first.report.to_document().dump();
    EXPECT_EQ(first.iterations_used, 1) << "variant " << variant;

    for (std::uint64_t twin_seed : {7001u, 7002u, 7003u}) {
      const auto twin = synth::make_example_pair(variant, twin_seed + static_cast<std::uint64_t>(variant) * 10);
      ASSERT_NE(twin.input, pair.input);
      const auto applied = apply_script(first.script, twin.input);
      EXPECT_TRUE(applied.issues.empty());
      EXPECT_TRUE(compare_output(applied.records, twin.output.to_document()).valid())
          << "variant " << variant << " twin " << twin_seed << "\n"
          << compare_output(applied.records, twin.output.to_document()).to_document().dump();
      EXPECT_TRUE(validate_dataset(applied.records).valid());
    }
    // Deterministic: deriving twice gives the same script.
    EXPECT_EQ(derive_script(pair.input, pair.output).script, derivation.script);
  }
  EXPECT_EQ(covered.size(), 11u);
}

namespace {

class FixedProposer final : public RuleProposer {
 public:
  Document propose_rules(const Document&, const Document&, const std::vector<std::string>& leaves) override {
    seen = leaves;
    return Document::parse(
        R"({"rules":[{"inputPath":"$.p.zz","outputPath":"$[?(@.name == 'Gyroscope')].values.z"}],"post_ops":[]})");
  }
  std::vector<std::string> seen;
};

}  // namespace

TEST(DeriveScript, FallbackProposerCoversUnmatchedLeaves) {
  const Document input = Document::parse(R"({"p":{"t":1705307400,"x":0.11,"y":-0.27,"zz":"9.8"}})");
  const auto out = StandardizedDataset::from_documents(Document::parse(
      R"([{"name":"Gyroscope","time":1705307400000000000,"values":{"x":0.11,"y":-0.27,"z":9.8}}])"));
  FixedProposer proposer;
  const auto derivation = derive_script(input, out, nullptr, &proposer);
  EXPECT_EQ(proposer.seen, std::vector<std::string>{"$[?(@.name == 'Gyroscope')].values.z"});
  EXPECT_TRUE(derivation.unmatched.empty());
  EXPECT_EQ(derivation.script.rules.back().input_path, "$.p.zz");
}
