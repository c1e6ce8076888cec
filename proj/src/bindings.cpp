#include "cec/clustering.hpp"
#include "cec/config.hpp"
#include "cec/driver.hpp"
#include "cec/io.hpp"
#include "cec/neighborhood.hpp"
#include "cec/scoring.hpp"
#include "cec/strategies.hpp"
#include "cec/synthetic.hpp"
#include "cec/trainer.hpp"
#include "cec/types.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;

namespace {

cec::EmbeddingPool pool_from_python(const cec::Matrix& vectors, std::optional<std::vector<int>> labels,
                                    std::optional<int> num_classes) {
  return cec::make_pool(vectors, std::move(labels), num_classes);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Pool-based active-learning selection engine (CEC and baselines).";

  py::register_exception<cec::DataError>(m, "DataError");
  py::register_exception<cec::ConfigError>(m, "ConfigError");

  py::class_<cec::EmbeddingPool>(m, "EmbeddingPool")
      .def(py::init(&pool_from_python), py::arg("vectors"), py::arg("labels") = std::nullopt,
           py::arg("num_classes") = std::nullopt)
      .def_readonly("vectors", &cec::EmbeddingPool::vectors)
      .def_readonly("labels", &cec::EmbeddingPool::labels)
      .def_readonly("ids", &cec::EmbeddingPool::ids)
      .def_readonly("num_classes", &cec::EmbeddingPool::num_classes)
      .def("__len__", [](const cec::EmbeddingPool& p) { return p.size(); });

  py::class_<cec::ClassHead>(m, "ClassHead")
      .def(py::init([](const cec::Matrix& rows, double temperature) {
             cec::ClassHead head{rows, temperature};
             head.validate();
             return head;
           }),
           py::arg("class_embeddings"), py::arg("temperature") = 0.01)
      .def_readonly("class_embeddings", &cec::ClassHead::class_embeddings)
      .def_readonly("temperature", &cec::ClassHead::temperature);

  py::class_<cec::SyntheticSpec>(m, "SyntheticSpec")
      .def(py::init([](int num_classes, int dim, int pool_size, std::vector<double> class_weights,
                       double cluster_spread, double outlier_fraction, std::uint64_t seed) {
             cec::SyntheticSpec spec;
             spec.num_classes = num_classes;
             spec.dim = dim;
             spec.pool_size = pool_size;
             spec.class_weights = class_weights.empty()
                                      ? std::vector<double>(static_cast<std::size_t>(num_classes), 1.0 / num_classes)
                                      : cec::normalize_weights(std::move(class_weights));
             spec.cluster_spread = cluster_spread;
             spec.outlier_fraction = outlier_fraction;
             spec.seed = seed;
             spec.validate();
             return spec;
           }),
           py::arg("num_classes"), py::arg("dim"), py::arg("pool_size"),
           py::arg("class_weights") = std::vector<double>{}, py::arg("cluster_spread") = 0.3,
           py::arg("outlier_fraction") = 0.0, py::arg("seed") = 0)
      .def_readonly("num_classes", &cec::SyntheticSpec::num_classes)
      .def_readonly("dim", &cec::SyntheticSpec::dim)
      .def_readonly("pool_size", &cec::SyntheticSpec::pool_size)
      .def_readonly("class_weights", &cec::SyntheticSpec::class_weights)
      .def_readonly("seed", &cec::SyntheticSpec::seed);

  py::class_<cec::ProbabilityTable>(m, "ProbabilityTable")
      .def_readonly("probs", &cec::ProbabilityTable::probs)
      .def_readonly("calibrated", &cec::ProbabilityTable::calibrated);

  py::class_<cec::ContextPrior>(m, "ContextPrior")
      .def_readonly("q", &cec::ContextPrior::q)
      .def_readonly("top_n", &cec::ContextPrior::top_n);

  py::class_<cec::NeighborGraph>(m, "NeighborGraph")
      .def_readonly("neighbor_ids", &cec::NeighborGraph::neighbor_ids)
      .def_readonly("sq_dists", &cec::NeighborGraph::sq_dists)
      .def_property_readonly("k", &cec::NeighborGraph::k);

  py::class_<cec::UncertaintyReport>(m, "UncertaintyReport")
      .def_readonly("self_entropy", &cec::UncertaintyReport::self_entropy)
      .def_readonly("neighbor_uncertainty", &cec::UncertaintyReport::neighbor_uncertainty)
      .def_readonly("combined", &cec::UncertaintyReport::combined)
      .def_readonly("k", &cec::UncertaintyReport::k)
      .def_readonly("alpha", &cec::UncertaintyReport::alpha);

  py::class_<cec::ClusterResult>(m, "ClusterResult")
      .def_readonly("centroids", &cec::ClusterResult::centroids)
      .def_readonly("assignment", &cec::ClusterResult::assignment)
      .def_readonly("weights_used", &cec::ClusterResult::weights_used)
      .def_readonly("iterations", &cec::ClusterResult::iterations)
      .def_readonly("converged", &cec::ClusterResult::converged)
      .def_readonly("objective_trace", &cec::ClusterResult::objective_trace);

  py::class_<cec::TrainConfig>(m, "TrainConfig")
      .def(py::init([](int epochs, double lr, double momentum, double weight_decay, int batch_size,
                       bool cosine_schedule, std::uint64_t seed) {
             cec::TrainConfig cfg{epochs, lr, momentum, weight_decay, batch_size, cosine_schedule, seed};
             cfg.validate();
             return cfg;
           }),
           py::arg("epochs") = 200, py::arg("lr") = 0.002, py::arg("momentum") = 0.9,
           py::arg("weight_decay") = 0.005, py::arg("batch_size") = 32, py::arg("cosine_schedule") = true,
           py::arg("seed") = 0)
      .def_readonly("epochs", &cec::TrainConfig::epochs)
      .def_readonly("lr", &cec::TrainConfig::lr);

  py::class_<cec::TrainedHead>(m, "TrainedHead")
      .def_readonly("head", &cec::TrainedHead::head)
      .def_readonly("loss_trace", &cec::TrainedHead::loss_trace);

  py::class_<cec::QuerySet>(m, "QuerySet")
      .def_readonly("selected", &cec::QuerySet::selected)
      .def_readonly("per_sample_scores", &cec::QuerySet::per_sample_scores);

  // embedding store
  m.def("load_pool",
        [](const std::string& path, const std::string& format) {
          return cec::load_pool(path, cec::parse_format(format));
        },
        py::arg("path"), py::arg("format") = "binary");
  m.def("save_pool",
        [](const cec::EmbeddingPool& pool, const std::string& path, const std::string& format) {
          cec::save_pool(pool, path, cec::parse_format(format));
        },
        py::arg("pool"), py::arg("path"), py::arg("format") = "binary");
  m.def("load_head",
        [](const std::string& path, const std::string& format, double temperature) {
          return cec::load_head(path, cec::parse_format(format), temperature);
        },
        py::arg("path"), py::arg("format") = "binary", py::arg("temperature") = 0.01);
  m.def("save_head",
        [](const cec::ClassHead& head, const std::string& path, const std::string& format) {
          cec::save_head(head, path, cec::parse_format(format));
        },
        py::arg("head"), py::arg("path"), py::arg("format") = "binary");
  m.def("normalize_rows", py::overload_cast<const cec::EmbeddingPool&>(&cec::normalize_rows));
  m.def("generate_synthetic", &cec::generate_synthetic, py::arg("spec"));
  m.def("subset_pool", &cec::subset_pool, py::arg("pool"), py::arg("rows"));

  // scoring
  m.def("cosine_similarities", &cec::cosine_similarities);
  m.def("zero_shot_probs", &cec::zero_shot_probs);
  m.def("entropy", &cec::entropy);
  m.def("row_entropies", &cec::row_entropies);
  m.def("contextualized_prior", &cec::contextualized_prior, py::arg("probs"), py::arg("top_n"));
  m.def("calibrate", &cec::calibrate);
  m.def("calibrated_entropy", &cec::calibrated_entropy, py::arg("pool"), py::arg("head"), py::arg("top_n") = 10);

  // neighborhood
  m.def("knn", &cec::knn, py::arg("pool"), py::arg("k"));
  m.def("neighbor_uncertainty", &cec::neighbor_uncertainty, py::arg("graph"), py::arg("self_entropy"),
        py::arg("alpha"));
  m.def("combined_uncertainty", &cec::combined_uncertainty, py::arg("self_entropy"), py::arg("neighbor"),
        py::arg("k"), py::arg("alpha"));

  // clustering
  m.def("weighted_kmeans", &cec::weighted_kmeans, py::arg("points"), py::arg("weights"), py::arg("b"),
        py::arg("seed") = 0);
  m.def("select_cluster_representatives", &cec::select_cluster_representatives);
  m.def("select_cluster_most_uncertain", &cec::select_cluster_most_uncertain);

  // strategies
  m.def("query",
        [](const std::string& strategy, const cec::EmbeddingPool& pool, const cec::ClassHead& head,
           std::vector<int> labeled, std::vector<int> unlabeled, int budget, int top_n, int knn_k, double alpha,
           std::uint64_t seed, bool round_one) {
          cec::QueryRequest req;
          req.pool = pool;
          req.head = head;
          req.labeled_ids = std::move(labeled);
          req.unlabeled_ids = std::move(unlabeled);
          req.budget = budget;
          req.params = {top_n, knn_k, alpha};
          req.seed = seed;
          const cec::Strategy s = cec::parse_strategy(strategy);
          return round_one ? cec::round_one_policy(s, req) : cec::run_strategy(s, req);
        },
        py::arg("strategy"), py::arg("pool"), py::arg("head"), py::arg("labeled"), py::arg("unlabeled"),
        py::arg("budget"), py::arg("top_n") = 10, py::arg("knn_k") = 10, py::arg("alpha") = 0.1,
        py::arg("seed") = 0, py::arg("round_one") = false);
  m.def("strategy_names", [] { return cec::strategy_names(); });

  // trainer
  m.def("train_head", &cec::train_head, py::arg("pool"), py::arg("labeled_ids"), py::arg("init"), py::arg("config"));
  m.def("evaluate", &cec::evaluate, py::arg("head"), py::arg("pool"), py::arg("eval_ids"));

  // driver: config file or key/value overrides, returns the summary JSON text
  m.def("run_experiment",
        [](const std::map<std::string, std::string>& options, const std::string& config_path, bool write_files) {
          cec::ALConfig cfg;
          if (!config_path.empty()) cec::apply_config(cfg, cec::read_config_file(config_path));
          cec::apply_config(cfg, options);
          cfg.validate();
          if (write_files) {
            const cec::ExperimentReport report = cec::run_experiment(cfg);
            return cec::summary_json(cfg, report);
          }
          const cec::Dataset data = cec::load_dataset(cfg);
          const cec::ExperimentReport report = cec::run_experiment(cfg, data);
          return cec::summary_json(cfg, report);
        },
        py::arg("options") = std::map<std::string, std::string>{}, py::arg("config_path") = "",
        py::arg("write_files") = false);
}
