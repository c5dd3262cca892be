#include <doctest.h>

#include <cmath>
#include <sstream>

#include "evid/domain_sim.hpp"
#include "evid/records.hpp"

using evid::ParseError;

namespace {

std::vector<evid::DirichletPrediction> read(const std::string& text) {
  std::istringstream in(text);
  return evid::read_alpha_vectors(in);
}

}  // namespace

TEST_CASE("alpha input: csv, json and json lines") {
  const auto csv = read("# header comment\n1, 1\n\n2,3,5\n");
  REQUIRE(csv.size() == 2);
  CHECK(csv[1].alpha()[2] == 5.0);

  const auto arr = read("[[1, 1], {\"alpha\": [2, 3, 5]}]");
  REQUIRE(arr.size() == 2);
  CHECK(arr[1].num_classes() == 3);

  const auto lines = read("[1, 2]\n{\"alpha\": [4, 4]}\n");
  REQUIRE(lines.size() == 2);
  CHECK(lines[1].alpha()[0] == 4.0);

  CHECK(read("").empty());
  CHECK(read("  \n").empty());
}

TEST_CASE("alpha input errors carry line numbers") {
  try {
    read("1,1\n2,x\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(read("1,0\n"), std::domain_error);
  CHECK_THROWS_AS(read("[[1, -2]]"), std::domain_error);
  CHECK_THROWS_AS(read("1\n"), ParseError);
  CHECK_THROWS_AS(read("[[1, 2]\n"), ParseError);
  CHECK_THROWS_AS(read("{\"beta\": [1, 2]}\n"), ParseError);
}

TEST_CASE("quantify record") {
  const auto j = evid::quantify_record(evid::DirichletPrediction({1, 1}));
  CHECK(j.at("prediction").get<int>() == 0);
  CHECK(j.at("uncertainty").at("variance").at("total").get<double>() == doctest::Approx(0.5));
  CHECK(j.at("uncertainty").at("entropy").at("total").get<double>() == doctest::Approx(std::log(2.0)));
  CHECK(j.at("covariance").at("total").size() == 2);
  CHECK(j.at("correlation")[0][1].get<double>() == doctest::Approx(-1.0));
}

TEST_CASE("dataset csv round-trip") {
  evid::DomainSpec spec;
  spec.samples_per_domain = 25;
  spec.feature_dim = 3;
  const auto [s, t] = evid::generate_domain_pair(spec);
  std::stringstream buf;
  evid::write_dataset_csv(buf, t);
  const std::string text = buf.str();
  CHECK(text.rfind("sample_id,domain,label,f1,f2,f3\n", 0) == 0);
  const auto back = evid::read_dataset_csv(buf);
  CHECK(back.domain == "target");
  CHECK(back.labels == t.labels);
  CHECK(back.features == t.features);

  std::istringstream bad("sample_id,domain,label,f1,f2\n0,a,0,1.0\n");
  CHECK_THROWS_AS(evid::read_dataset_csv(bad), ParseError);
}

TEST_CASE("model checkpoint round-trip") {
  const auto m = evid::EvidentialMLP::glorot({2, 5, 3}, 4);
  const auto j = evid::model_checkpoint(m);
  const auto back = evid::model_from_checkpoint(nlohmann::json::parse(j.dump()));
  CHECK(back.architecture() == m.architecture());
  CHECK(back.flat_parameters() == m.flat_parameters());
  auto broken = j;
  broken["weights"].erase(0);
  CHECK_THROWS(evid::model_from_checkpoint(broken));
}

TEST_CASE("csv exports") {
  std::ostringstream loss;
  evid::write_loss_curve_csv(loss, {{1, 0.5, 0.25}});
  CHECK(loss.str() == "epoch,supervised_loss,ug_loss\n1,0.5,0.25\n");

  std::ostringstream sel;
  evid::write_selection_log_csv(sel, {{2, 17, evid::SelectionType::certain, 0.125, 0.5, 3, 1}});
  CHECK(sel.str() ==
        "round,sample_id,selection_type,EU,AU,predicted_class,true_class\n2,17,certain,0.125,0.5,3,1\n");

  std::ostringstream hist;
  evid::write_histogram_csv(hist, {{"target", 4, 0.5, 0.25}});
  CHECK(hist.str() == "domain,sample_id,AU,EU\ntarget,4,0.5,0.25\n");
}
