#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "neurogrow/diagnostics.hpp"
#include "neurogrow/harness.hpp"

namespace py = pybind11;
using namespace neurogrow;

namespace {

Matrix matrix_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2) throw DimensionError("expected a 2-d array");
    Matrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
    std::copy(a.data(), a.data() + m.size(), m.data());
    return m;
}

py::array_t<double> array_from_matrix(const Matrix& m) {
    py::array_t<double> a({m.rows(), m.cols()});
    std::copy(m.data(), m.data() + m.size(), a.mutable_data());
    return a;
}

Batch make_batch(const py::array_t<double>& inputs, const py::object& targets,
                 const py::object& labels) {
    Batch b;
    b.inputs = matrix_from_array(inputs);
    if (!targets.is_none()) b.targets = matrix_from_array(targets.cast<py::array_t<double>>());
    if (!labels.is_none()) b.labels = labels.cast<std::vector<int>>();
    return b;
}

}  // namespace

PYBIND11_MODULE(_neurogrow, m) {
    m.doc() = "growing ReLU MLPs: shared-weights insertion and probe-voting allocation";

    py::enum_<OutputHead>(m, "OutputHead")
        .value("identity", OutputHead::Identity)
        .value("logits", OutputHead::Logits);
    py::enum_<LossKind>(m, "LossKind")
        .value("mse", LossKind::Mse)
        .value("softmax_ce", LossKind::SoftmaxCe);
    py::enum_<Task>(m, "Task")
        .value("reconstruction", Task::Reconstruction)
        .value("classification", Task::Classification);
    py::enum_<ExtenderKind>(m, "ExtenderKind")
        .value("swe", ExtenderKind::Swe)
        .value("kaiming", ExtenderKind::Kaiming)
        .value("frobenius", ExtenderKind::Frobenius)
        .value("firefly_lite", ExtenderKind::FireflyLite);

    py::class_<Network>(m, "Network")
        .def_static(
            "make_mlp",
            [](std::size_t input_dim, const std::vector<std::size_t>& hidden,
               std::size_t output_dim, OutputHead head, std::uint64_t seed) {
                Rng rng(seed);
                return Network::make_mlp(input_dim, hidden, output_dim, head, rng);
            },
            py::arg("input_dim"), py::arg("hidden"), py::arg("output_dim"),
            py::arg("head") = OutputHead::Identity, py::arg("seed") = 0)
        .def_property_readonly("hidden_widths",
                               [](const Network& net) {
                                   std::vector<std::size_t> w;
                                   for (std::size_t l = 0; l < net.n_hidden(); ++l)
                                       w.push_back(net.hidden_width(l));
                                   return w;
                               })
        .def_property_readonly("input_dim", &Network::input_dim)
        .def_property_readonly("output_dim", &Network::output_dim)
        .def("forward",
             [](const Network& net, const py::array_t<double>& X) {
                 return array_from_matrix(forward(net, matrix_from_array(X)).output());
             })
        .def("birth_stages", [](const Network& net, std::size_t layer) {
            std::vector<int> out;
            for (const auto& t : net.layers.at(layer).tags) out.push_back(t.birth_stage);
            return out;
        });

    m.def("kaiming_init", [](std::size_t n_out, std::size_t n_in, std::uint64_t seed) {
        Rng rng(seed);
        return array_from_matrix(kaiming_init(n_out, n_in, rng));
    });

    m.def(
        "swe_extend",
        [](Network& net, std::size_t layer, std::size_t m_new,
           const py::array_t<double>& inputs, const py::object& targets,
           const py::object& labels, LossKind kind, double lr, int stage,
           std::uint64_t seed) {
            Rng rng(seed);
            swe_extend(net, layer, m_new, make_batch(inputs, targets, labels), kind, lr,
                       stage, rng);
        },
        py::arg("net"), py::arg("layer"), py::arg("m"), py::arg("inputs"),
        py::arg("targets") = py::none(), py::arg("labels") = py::none(),
        py::arg("loss") = LossKind::Mse, py::arg("lr") = 1e-3, py::arg("stage") = 1,
        py::arg("seed") = 0);

    m.def(
        "kaiming_extend",
        [](Network& net, std::size_t layer, std::size_t m_new, int stage, std::uint64_t seed) {
            Rng rng(seed);
            kaiming_extend(net, layer, m_new, stage, rng);
        },
        py::arg("net"), py::arg("layer"), py::arg("m"), py::arg("stage") = 1,
        py::arg("seed") = 0);

    m.def(
        "frobenius_extend",
        [](Network& net, std::size_t layer, std::size_t m_new, int stage, std::uint64_t seed) {
            Rng rng(seed);
            frobenius_extend(net, layer, m_new, stage, rng);
        },
        py::arg("net"), py::arg("layer"), py::arg("m"), py::arg("stage") = 1,
        py::arg("seed") = 0);

    m.def(
        "probe_gradients",
        [](const Network& net, std::size_t layer, std::size_t probes,
           const py::array_t<double>& inputs, const py::object& targets,
           const py::object& labels, LossKind kind, std::uint64_t seed) {
            Rng rng(seed);
            return probe_gradients(net, layer, probes, make_batch(inputs, targets, labels),
                                   kind, rng)
                .gradients;
        },
        py::arg("net"), py::arg("layer"), py::arg("probes"), py::arg("inputs"),
        py::arg("targets") = py::none(), py::arg("labels") = py::none(),
        py::arg("loss") = LossKind::Mse, py::arg("seed") = 0);

    m.def(
        "svod_allocate",
        [](const Network& net, std::size_t total_m, std::size_t probes,
           const py::array_t<double>& inputs, const py::object& targets,
           const py::object& labels, LossKind kind, std::uint64_t seed) {
            Rng rng(seed);
            return svod_allocate(net, total_m, probes, make_batch(inputs, targets, labels),
                                 kind, rng)
                .per_layer_counts;
        },
        py::arg("net"), py::arg("total_m"), py::arg("probes"), py::arg("inputs"),
        py::arg("targets") = py::none(), py::arg("labels") = py::none(),
        py::arg("loss") = LossKind::Mse, py::arg("seed") = 0);

    m.def(
        "ras_allocate",
        [](std::size_t total_m, std::size_t n_hidden, std::uint64_t seed) {
            Rng rng(seed);
            return ras_allocate(total_m, n_hidden, rng).per_layer_counts;
        },
        py::arg("total_m"), py::arg("n_hidden"), py::arg("seed") = 0);

    m.def(
        "measure_inactivity",
        [](const Network& net, const py::array_t<double>& X, const py::object& stage) {
            std::optional<int> filter;
            if (!stage.is_none()) filter = stage.cast<int>();
            const InactivityReport rep = measure_inactivity(net, matrix_from_array(X), filter);
            py::dict d;
            d["inactive_total"] = rep.inactive_total();
            d["total_neurons"] = rep.total_neurons();
            d["inactive_new"] = rep.inactive_new();
            d["new_total"] = rep.new_total();
            d["pct_inactive_new"] = rep.pct_inactive_new();
            return d;
        },
        py::arg("net"), py::arg("X"), py::arg("stage") = py::none());

    m.def(
        "grad_check",
        [](const Network& net, const py::array_t<double>& inputs, const py::object& targets,
           const py::object& labels, LossKind kind, double step) {
            return grad_check(net, make_batch(inputs, targets, labels), kind, step);
        },
        py::arg("net"), py::arg("inputs"), py::arg("targets") = py::none(),
        py::arg("labels") = py::none(), py::arg("loss") = LossKind::Mse,
        py::arg("step") = 1e-6);

    m.def(
        "train",
        [](Network& net, const py::array_t<double>& X, const py::object& targets,
           const py::object& labels, std::size_t epochs, std::size_t batch_size, double lr,
           LossKind kind, std::uint64_t seed, std::size_t n_classes) {
            Dataset ds;
            ds.X = matrix_from_array(X);
            if (!targets.is_none()) {
                ds.targets = matrix_from_array(targets.cast<py::array_t<double>>());
                ds.task = Task::Reconstruction;
            }
            if (!labels.is_none()) {
                ds.labels = labels.cast<std::vector<int>>();
                ds.task = Task::Classification;
                ds.n_classes = n_classes;
            }
            AdamState adam = AdamState::for_network(net);
            Rng rng(seed);
            std::vector<std::pair<double, double>> out;
            for (const auto& em : train(net, adam, ds, epochs, batch_size, lr, kind, rng))
                out.emplace_back(em.loss, em.accuracy);
            return out;
        },
        py::arg("net"), py::arg("X"), py::arg("targets") = py::none(),
        py::arg("labels") = py::none(), py::arg("epochs") = 1, py::arg("batch_size") = 32,
        py::arg("lr") = 1e-3, py::arg("loss") = LossKind::Mse, py::arg("seed") = 0,
        py::arg("n_classes") = 0);

    m.def("save_network", &save_network);
    m.def("load_network", &load_network);

    m.def("synthetic_blobs",
          [](std::size_t n_classes, std::size_t n_per_class, std::size_t dim, double spread,
             std::uint64_t seed) {
              Rng rng(seed);
              Dataset ds = synthetic_blobs(n_classes, n_per_class, dim, spread, rng);
              return py::make_tuple(array_from_matrix(ds.X), ds.labels);
          });

    m.def("load_idx", [](const std::string& images, const std::string& labels) {
        Dataset ds = load_idx(images, labels);
        return py::make_tuple(array_from_matrix(ds.X), ds.labels);
    });
}
