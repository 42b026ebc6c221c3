#include <gtest/gtest.h>

#include "lclh/lclh.hpp"

using namespace lclh;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_instance(text);
  } catch (const InvalidArgument& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(InstanceIo, LhRoundTrip) {
  GenSpec g;
  g.kind = "lh";
  g.n = 4;
  g.seed = 9;
  const Instance inst = generate_instance(g);
  const std::string text = serialize(inst);
  const Instance back = parse_instance(text);
  EXPECT_EQ(serialize(back), text);
  EXPECT_EQ(instance_digest(back), instance_digest(inst));
  const auto& a = std::get<LocalHamiltonianInstance>(inst);
  const auto& b = std::get<LocalHamiltonianInstance>(back);
  ASSERT_EQ(a.terms.size(), b.terms.size());
  for (std::size_t i = 0; i < a.terms.size(); ++i) EXPECT_EQ((a.terms[i].matrix - b.terms[i].matrix).norm(), 0.0);
  EXPECT_EQ(lh_decide(a).lambda_min, lh_decide(b).lambda_min);
}

TEST(InstanceIo, LcRoundTripKeepsMode) {
  GenSpec g;
  g.kind = "lc";
  g.stoquastic = true;
  g.beta = 0.25;
  g.seed = 3;
  const Instance inst = generate_instance(g);
  const Instance back = parse_instance(serialize(inst));
  EXPECT_EQ(std::get<LocalConsistencyInstance>(back).mode, ConsistencyMode::Stoquastic);
  EXPECT_EQ(instance_digest(back), instance_digest(inst));
}

TEST(InstanceIo, GenerationIsDeterministic) {
  for (const std::string kind : {"lh", "lc"}) {
    GenSpec g;
    g.kind = kind;
    g.consistent = false;
    g.seed = 77;
    EXPECT_EQ(serialize(generate_instance(g)), serialize(generate_instance(g)));
    GenSpec h = g;
    h.seed = 78;
    EXPECT_NE(instance_digest(generate_instance(g)), instance_digest(generate_instance(h)));
  }
}

TEST(InstanceIo, ErrorsNameTheField) {
  EXPECT_NE(error_of("{").find("parse error"), std::string::npos);
  EXPECT_NE(error_of("{}").find("$.format_version"), std::string::npos);
  EXPECT_NE(error_of(R"({"format_version":"2.0"})").find("$.format_version"), std::string::npos);
  const std::string head = R"({"format_version":"1.0","kind":"lh","shape":{"n":2,"d":2},"k":2,"s":5,"a":0,"b":0.5,)";
  EXPECT_NE(error_of(head + R"("terms":[{"subset":[0,1],"matrix":[[[1,0]]]}]})").find("$.terms[0].matrix"),
            std::string::npos);
  EXPECT_NE(error_of(head + R"("terms":[{"subset":[1,0],"matrix":[]}]})").find("$.terms[0].subset"),
            std::string::npos);
  EXPECT_NE(error_of(head + R"("terms":[{"subset":[0],"matrix":[[[1,0],[0,0]],[[0,0],"x"]]}]})")
                .find("$.terms[0].matrix[1][1]"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"format_version":"1.0","kind":"lh","shape":{"n":0,"d":2}})").find("$.shape"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"format_version":"1.0","kind":"xx","shape":{"n":1,"d":2},"k":1,"s":1})").find("$.kind"),
            std::string::npos);
  // Stoquastic flag on a Hamiltonian with a positive off-diagonal entry.
  const std::string stoq = R"({"format_version":"1.0","kind":"lh","shape":{"n":1,"d":2},"stoquastic":true,"k":1,)"
                           R"("s":5,"a":0,"b":0.5,"terms":[{"subset":[0],"matrix":[[[0,0],[1,0]],[[1,0],[0,0]]]}]})";
  EXPECT_NE(error_of(stoq).find("$.stoquastic"), std::string::npos);
}

TEST(InstanceIo, GeneratorRejectsBadSpecs) {
  GenSpec g;
  g.kind = "lc";
  g.beta = 3.0;
  EXPECT_THROW(generate_instance(g), InvalidArgument);
  g.kind = "zz";
  g.beta = 0.5;
  EXPECT_THROW(generate_instance(g), InvalidArgument);
  g.kind = "lh";
  g.n = 13;
  EXPECT_THROW(generate_instance(g), DimensionCapExceeded);
}

TEST(ReportJson, FieldsPresentAndFinite) {
  GenSpec g;
  g.kind = "lc";
  g.seed = 2;
  const auto inst = std::get<LocalConsistencyInstance>(generate_instance(g));
  EngineOptions eo;
  ReductionOptions opt;
  opt.engine.record_points = true;
  const auto rep = lc_to_lh(inst, exact_lh_oracle(), opt);
  const json j = to_json(rep, true);
  EXPECT_EQ(j["reduction"], "lc_to_lh");
  EXPECT_EQ(j["verdict"], to_string(rep.verdict));
  EXPECT_EQ(j["transcript"]["records"].size(), rep.transcript.records.size());
  EXPECT_NO_THROW(json::parse(j.dump()));
}

TEST(Alternatives, ExactlyOneHolds) {
  for (int i = 0; i < 6; ++i) {
    const auto plant = i % 2 ? AlternativeFamily::Plant::Point : AlternativeFamily::Plant::State;
    const auto fam = make_alternative_family(2 + i, 1 + i % 3, 0.1, plant, 100 + i);
    const auto one = certify_alternative_one(fam);
    const auto two = certify_alternative_two(fam);
    EXPECT_NE(one.has_value(), two.has_value()) << "family " << i;
    if (plant == AlternativeFamily::Plant::Point) {
      ASSERT_TRUE(one.has_value());
      EXPECT_LT(alternative_one_value(fam, *one), -0.1);
    } else {
      ASSERT_TRUE(two.has_value());
      EXPECT_NO_THROW(DensityMatrix::validate_state(*two, "Z"));
      for (const auto& f : fam.f) EXPECT_LE(std::abs((f * *two).trace().real()), 0.1 / 4 + 1e-12);
    }
  }
}

TEST(Suites, SmallRunsPass) {
  SuiteOptions opt;
  for (const auto& rep : {verify_orthogonality(opt), verify_perron(opt, 10), verify_roundtrip(opt, 2)}) {
    EXPECT_TRUE(rep.passed()) << rep.name;
    EXPECT_FALSE(rep.rows.empty());
  }
  EXPECT_EQ(expected_generator_trace(3, 8, 8), 1.5);
  EXPECT_EQ(expected_generator_trace(4, 0, 0), 4.0);
}
