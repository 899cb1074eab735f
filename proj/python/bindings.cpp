#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "evmag/config_json.hpp"
#include "evmag/event_sim.hpp"
#include "evmag/io.hpp"
#include "evmag/magnifier.hpp"
#include "evmag/metrics.hpp"
#include "evmag/motion_solver.hpp"
#include "evmag/synthgen.hpp"

namespace py = pybind11;
using namespace evmag;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Frame to_frame(const Array& a, Micros t = 0) {
    if (a.ndim() != 2) throw py::value_error("expected a 2D array");
    Frame f(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)), t);
    std::copy(a.data(), a.data() + a.size(), f.data.begin());
    return f;
}

Array to_array(const Frame& f) {
    Array a({f.height, f.width});
    std::copy(f.data.begin(), f.data.end(), a.mutable_data());
    return a;
}

Array stack(const FrameSequence& frames) {
    if (frames.empty()) return Array(std::vector<py::ssize_t>{0, 0, 0});
    const Frame& f0 = frames.front();
    Array a({static_cast<py::ssize_t>(frames.size()), static_cast<py::ssize_t>(f0.height),
             static_cast<py::ssize_t>(f0.width)});
    double* p = a.mutable_data();
    for (const Frame& f : frames) p = std::copy(f.data.begin(), f.data.end(), p);
    return a;
}

// Structured (t, x, y, p) view of the stream as a dict of arrays.
py::dict events_dict(const EventStream& s) {
    py::array_t<std::int64_t> t(s.size());
    py::array_t<std::int32_t> x(s.size());
    py::array_t<std::int32_t> y(s.size());
    py::array_t<std::int8_t> p(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const Event& e = s.events()[i];
        t.mutable_at(i) = e.t;
        x.mutable_at(i) = e.x;
        y.mutable_at(i) = e.y;
        p.mutable_at(i) = e.p;
    }
    py::dict d;
    d["t"] = t;
    d["x"] = x;
    d["y"] = y;
    d["p"] = p;
    return d;
}

Json from_py(const py::object& o) { return Json::parse(py::str(py::module_::import("json").attr("dumps")(o)).cast<std::string>()); }

py::object to_py(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

}  // namespace

PYBIND11_MODULE(_evmag, m) {
    m.doc() = "Event-based sub-pixel motion magnification";

    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    py::class_<EventStream>(m, "EventStream")
        .def_property_readonly("width", &EventStream::width)
        .def_property_readonly("height", &EventStream::height)
        .def_property_readonly("t_start", &EventStream::t_start)
        .def_property_readonly("t_end", &EventStream::t_end)
        .def("__len__", &EventStream::size)
        .def("arrays", &events_dict)
        .def("save", [](const EventStream& s, const std::string& path) { io::write_events(path, s); });

    m.def(
        "load_events",
        [](const std::string& path, std::optional<Micros> t_start, std::optional<Micros> t_end) {
            std::optional<io::TimeSpan> span;
            if (t_start || t_end) span = io::TimeSpan{t_start.value_or(0), t_end.value_or(0)};
            return io::read_events(path, span);
        },
        py::arg("path"), py::arg("t_start") = py::none(), py::arg("t_end") = py::none());

    m.def(
        "simulate_events",
        [](const std::vector<Array>& frames, const std::vector<Micros>& times, const py::object& sim) {
            if (frames.size() != times.size()) throw py::value_error("frames and times differ in length");
            FrameSequence seq;
            for (std::size_t k = 0; k < frames.size(); ++k) seq.push_back(to_frame(frames[k], times[k]));
            const SimConfig cfg = sim.is_none() ? SimConfig{} : sim_config_from_json(from_py(sim));
            py::gil_scoped_release release;
            return simulate_events(seq, cfg);
        },
        py::arg("frames"), py::arg("times"), py::arg("sim") = py::none());

    m.def(
        "reconstruct_intensity",
        [](const Array& i0, const EventStream& s, double c, Micros tau, double log_floor) {
            return to_array(reconstruct_intensity(to_frame(i0, s.t_start()), s, c, tau, log_floor));
        },
        py::arg("i0"), py::arg("stream"), py::arg("c"), py::arg("tau"), py::arg("log_floor") = 0.0);

    m.def(
        "motion_fields",
        [](const Array& i0, const EventStream& s, double c, int n_steps, const py::object& solver) {
            const SolverConfig cfg = solver.is_none() ? SolverConfig{} : solver_config_from_json(from_py(solver));
            const auto fields = motion_field_series(to_frame(i0, s.t_start()), s, c, n_steps, cfg);
            py::list out;
            for (const MotionField& f : fields) {
                py::dict d;
                d["tau"] = f.tau;
                d["dx"] = py::array_t<double>({f.height, f.width}, f.dx.data());
                d["dy"] = py::array_t<double>({f.height, f.width}, f.dy.data());
                d["valid"] = py::array_t<std::uint8_t>({f.height, f.width}, f.valid.data());
                out.append(d);
            }
            return out;
        },
        py::arg("i0"), py::arg("stream"), py::arg("c"), py::arg("n_steps"), py::arg("solver") = py::none());

    m.def(
        "magnify",
        [](const Array& i0, const Array& i1, const EventStream& s, double alpha, int n_frames,
           const py::object& filter, const py::object& solver, double c) {
            MagnifyRequest req;
            req.i0 = to_frame(i0, s.t_start());
            req.i1 = to_frame(i1, s.t_end());
            req.stream = s;
            req.alpha = alpha;
            req.n_frames = n_frames;
            req.c = c;
            if (!solver.is_none()) req.solver = solver_config_from_json(from_py(solver));
            if (!filter.is_none()) req.filter = filter_spec_from_json(from_py(filter));
            MagnifyResult r;
            {
                py::gil_scoped_release release;
                r = magnify_sequence(req);
            }
            py::dict d;
            d["frames"] = stack(r.frames);
            d["valid_fraction"] = r.valid_fraction;
            d["empty_stream"] = r.empty_stream;
            d["filter"] = r.filter ? to_py(to_json(*r.filter)) : py::none();
            return d;
        },
        py::arg("i0"), py::arg("i1"), py::arg("stream"), py::arg("alpha"), py::arg("n_frames"),
        py::arg("filter") = py::none(), py::arg("solver") = py::none(), py::arg("c") = 0.2);

    m.def(
        "temporal_bandpass",
        [](const Array& series, double fps, double f_lo, double f_hi) {
            if (series.ndim() != 1) throw py::value_error("expected a 1D array");
            const auto out = temporal_bandpass(std::span<const double>(series.data(), series.size()),
                                               FilterSpec{fps, f_lo, f_hi});
            return py::array_t<double>(out.size(), out.data());
        },
        py::arg("series"), py::arg("fps"), py::arg("f_lo"), py::arg("f_hi"));

    m.def("psnr", [](const Array& a, const Array& b) { return psnr(to_frame(a), to_frame(b)); });
    m.def("ssim", [](const Array& a, const Array& b) { return ssim(to_frame(a), to_frame(b)); });

    m.def(
        "dominant_frequency",
        [](const Array& series, double fps) {
            if (series.ndim() != 1) throw py::value_error("expected a 1D array");
            const auto r = dominant_frequency_of_series(std::span<const double>(series.data(), series.size()), fps);
            py::list spec;
            for (const SpectrumBin& b : r.spectrum) spec.append(py::make_tuple(b.freq_hz, b.amplitude));
            py::dict d;
            d["dominant_hz"] = r.dominant_hz;
            d["resolution_hz"] = r.resolution_hz;
            d["zero_amplitude"] = r.zero_amplitude;
            d["spectrum"] = spec;
            return d;
        },
        py::arg("series"), py::arg("fps"));

    m.def(
        "bar_scene",
        [](int n_frames, double amplitude_px, double freq_hz, double alpha, std::uint64_t seed) {
            BarSceneOptions o;
            o.trajectory.n_frames = n_frames;
            o.trajectory.amplitude_px = amplitude_px;
            o.trajectory.freq_hz = freq_hz;
            o.alpha_mag = alpha;
            o.seed = seed;
            const SceneSpec spec = make_bar_scene(o);
            RenderedScene r;
            {
                py::gil_scoped_release release;
                r = render_scene(spec);
            }
            std::vector<Micros> times;
            for (const Frame& f : r.small) times.push_back(f.t);
            std::vector<double> gt;
            for (const Vec2& v : r.gt_motion) gt.push_back(v.x);
            py::dict d;
            d["small"] = stack(r.small);
            d["magnified"] = stack(r.magnified);
            d["times"] = times;
            d["gt_dx"] = gt;
            return d;
        },
        py::arg("n_frames") = 33, py::arg("amplitude_px") = 0.25, py::arg("freq_hz") = 32.0, py::arg("alpha") = 50.0,
        py::arg("seed") = 0);

    m.def(
        "generate_dataset",
        [](const py::object& config, const std::string& out_dir) {
            const DatasetConfig cfg = config.is_none() ? DatasetConfig{} : dataset_config_from_json(from_py(config));
            Manifest man;
            {
                py::gil_scoped_release release;
                man = generate_dataset(cfg, out_dir);
            }
            return to_py(to_json(man));
        },
        py::arg("config"), py::arg("out_dir"));
}
