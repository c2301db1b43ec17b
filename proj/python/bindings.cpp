#include <pybind11/functional.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "smarthouse/auth.hpp"
#include "smarthouse/client.hpp"
#include "smarthouse/demo.hpp"
#include "smarthouse/home_server.hpp"
#include "smarthouse/map_codec.hpp"
#include "smarthouse/records.hpp"
#include "smarthouse/store.hpp"

namespace py = pybind11;
using namespace smarthouse;

namespace {

using PointPair = std::pair<std::pair<int, int>, std::pair<int, int>>;

std::vector<std::string> format_all(const auto& items, auto format) {
    std::vector<std::string> out;
    for (const auto& item : items) out.push_back(format(item));
    return out;
}

class PyServer {
public:
    PyServer(std::string special_code, std::string shared_secret, int ttl_seconds, std::optional<std::string> store_text,
             std::int64_t start_ms) {
        ServerConfig config;
        config.auth = {std::move(special_code), std::move(shared_secret), std::chrono::seconds{ttl_seconds}};
        Snapshot initial = store_text ? deserialize(*store_text) : Snapshot{};
        server_ = std::make_unique<HomeServer>(std::move(config), std::move(initial), SimTime{start_ms});
    }

    HomeServer& get() { return *server_; }

    std::vector<std::tuple<std::string, std::string, std::string>> step(int ticks) {
        std::vector<std::tuple<std::string, std::string, std::string>> fired;
        for (int i = 0; i < ticks; ++i)
            for (const auto& f : server_->step())
                fired.emplace_back(f.source == automation::FiredAction::Source::rule ? "rule" : "schedule", f.source_id,
                                   records::format_action_calls({f.call}));
        return fired;
    }

    std::optional<std::tuple<std::string, std::optional<int>, std::int64_t>> state(Oid oid) {
        const auto snap = server_->store().snapshot();
        const auto* s = snap->state(oid);
        if (!s) return std::nullopt;
        return std::make_tuple(s->status, s->level, static_cast<std::int64_t>(s->timestamp.count()));
    }

private:
    std::unique_ptr<HomeServer> server_;
};

class PyClient {
public:
    PyClient(PyServer& server, const std::string& client_id, const std::string& username, const std::string& password,
             const std::string& special_code, const std::string& shared_secret)
        : transport_(server.get()) {
        transport_.capture_into(&traffic_);
        client::ClientConfig config;
        config.client_id = client_id;
        config.username = username;
        config.special_code = special_code;
        config.shared_secret = shared_secret;
        HomeServer* hs = &server.get();
        session_.emplace(client::ClientSession::login(transport_, config, password, [hs] { return hs->clock().now(); }));
    }

    client::ClientSession& s() { return *session_; }
    const std::vector<std::string>& traffic() const { return traffic_; }

private:
    std::vector<std::string> traffic_;
    client::LoopbackTransport transport_;
    std::optional<client::ClientSession> session_;
};

}  // namespace

PYBIND11_MODULE(_smarthouse, m) {
    m.doc() = "Smart house remote control: map codec, authentication, in-process server and client.";

    auto value_error = py::reinterpret_borrow<py::object>(PyExc_ValueError);
    py::register_exception<map::CodecError>(m, "CodecError", value_error);
    py::register_exception<records::RecordError>(m, "RecordError", value_error);
    py::register_exception<StoreError>(m, "StoreError", value_error);
    py::register_exception<wire::WireError>(m, "WireError", value_error);
    py::register_exception<client::ValidationError>(m, "ValidationError", value_error);
    py::register_exception<client::AuthRefused>(m, "AuthRefused");
    py::register_exception<client::NetworkError>(m, "NetworkError");

    // map codec
    py::class_<map::Point>(m, "Point")
        .def(py::init<>())
        .def(py::init([](int x, int y) { return map::Point{x, y}; }), py::arg("x"), py::arg("y"))
        .def_readwrite("x", &map::Point::x)
        .def_readwrite("y", &map::Point::y)
        .def(py::self == py::self)
        .def("__repr__", [](const map::Point& p) { return "Point(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")"; });
    py::class_<map::Rgb>(m, "Rgb")
        .def(py::init<>())
        .def(py::init([](int r, int g, int b) { return map::Rgb{r, g, b}; }), py::arg("r"), py::arg("g"), py::arg("b"))
        .def_readwrite("r", &map::Rgb::r)
        .def_readwrite("g", &map::Rgb::g)
        .def_readwrite("b", &map::Rgb::b)
        .def(py::self == py::self);
    py::class_<map::Polyline>(m, "Polyline")
        .def(py::init<>())
        .def(py::init([](int width, map::Rgb color, std::vector<map::Point> points) {
                 return map::Polyline{width, color, std::move(points)};
             }),
             py::arg("width"), py::arg("color"), py::arg("points"))
        .def_readwrite("width", &map::Polyline::width)
        .def_readwrite("color", &map::Polyline::color)
        .def_readwrite("points", &map::Polyline::points)
        .def(py::self == py::self);
    py::class_<map::IconRecord>(m, "IconRecord")
        .def(py::init<>())
        .def(py::init([](Oid oid, std::string name, map::Point position, int icon_id) {
                 return map::IconRecord{oid, std::move(name), position, icon_id};
             }),
             py::arg("oid"), py::arg("name"), py::arg("position"), py::arg("icon_id"))
        .def_readwrite("oid", &map::IconRecord::oid)
        .def_readwrite("name", &map::IconRecord::name)
        .def_readwrite("position", &map::IconRecord::position)
        .def_readwrite("icon_id", &map::IconRecord::icon_id)
        .def(py::self == py::self);
    py::class_<map::MapScene>(m, "MapScene")
        .def(py::init<>())
        .def(py::init([](std::vector<map::Polyline> walls, std::vector<map::IconRecord> icons) {
                 return map::MapScene{std::move(walls), std::move(icons)};
             }),
             py::arg("walls"), py::arg("icons"))
        .def_readwrite("walls", &map::MapScene::walls)
        .def_readwrite("icons", &map::MapScene::icons)
        .def(py::self == py::self);

    m.def("encode_scene", &map::encode_scene, py::arg("scene"));
    m.def("decode_scene", [](std::string_view text) { return map::decode_scene(text); }, py::arg("text"));
    m.def(
        "pack_header",
        [](int width, std::tuple<int, int, int> rgb) -> PointPair {
            const auto [p1, p2] = map::pack_header(width, {std::get<0>(rgb), std::get<1>(rgb), std::get<2>(rgb)});
            return {{p1.x, p1.y}, {p2.x, p2.y}};
        },
        py::arg("width"), py::arg("rgb"));
    m.def(
        "unpack_header",
        [](std::pair<int, int> first, std::pair<int, int> second) {
            const auto [width, c] = map::unpack_header({first.first, first.second}, {second.first, second.second});
            return std::make_tuple(width, std::make_tuple(c.r, c.g, c.b));
        },
        py::arg("first"), py::arg("second"));
    m.def(
        "hit_test",
        [](const map::MapScene& scene, int x, int y, int radius) { return map::hit_test(scene, {x, y}, radius); },
        py::arg("scene"), py::arg("x"), py::arg("y"), py::arg("radius"));
    m.def("render_ascii", &client::render_ascii, py::arg("scene"), py::arg("cols") = 64, py::arg("rows") = 24);

    // auth
    m.def("compute_credential_hash", &auth::compute_credential_hash, py::arg("username"), py::arg("password"),
          py::arg("magic_hex"));
    m.def("seal_magic", &auth::seal_magic, py::arg("magic_hex"), py::arg("shared_secret"), py::arg("client_id"));
    m.def("unseal_magic", &auth::unseal_magic, py::arg("sealed_hex"), py::arg("shared_secret"), py::arg("client_id"));
    m.def("is_magic_hex", &auth::is_magic_hex, py::arg("text"));

    // domain records
    m.def(
        "validate_device", [](std::string_view line) { return validate_device(records::parse_device(line)); },
        py::arg("record"), "Problems with a device record line; empty when valid.");
    m.def("demo_store", [](std::string_view password, std::string_view salt_hex) {
        return serialize(demo::house(password, salt_hex));
    }, py::arg("admin_password"), py::arg("salt_hex") = "");

    py::class_<PyServer>(m, "HomeServer")
        .def(py::init<std::string, std::string, int, std::optional<std::string>, std::int64_t>(),
             py::arg("special_code"), py::arg("shared_secret"), py::arg("ttl_seconds") = 300,
             py::arg("store_text") = py::none(), py::arg("start_ms") = 0)
        .def("handle", [](PyServer& s, std::string_view target) { return s.get().handle_target(target); },
             py::arg("target"))
        .def("handle_sms", [](PyServer& s, std::string_view frame) { return s.get().handle_sms(frame); },
             py::arg("frame"))
        .def("step", &PyServer::step, py::arg("ticks") = 1,
             "Advances the virtual clock; returns fired actions as (source, id, action).")
        .def("run_for", [](PyServer& s, double seconds) {
            s.get().run_for(SimTime{static_cast<std::int64_t>(seconds * 1000)});
        }, py::arg("seconds"))
        .def("attach_demo_behaviors", [](PyServer& s) { demo::attach_behaviors(s.get().fleet()); })
        .def_property_readonly("now_ms", [](PyServer& s) { return static_cast<std::int64_t>(s.get().clock().now().count()); })
        .def("state", &PyServer::state, py::arg("oid"), "(status, level, timestamp_ms) or None.")
        .def("store_text", [](PyServer& s) { return serialize(*s.get().store().snapshot()); })
        .def("persist", [](PyServer& s, const std::string& path) { s.get().store().persist(path); }, py::arg("path"));

    py::class_<PyClient>(m, "Client")
        .def(py::init<PyServer&, const std::string&, const std::string&, const std::string&, const std::string&,
                      const std::string&>(),
             py::arg("server"), py::arg("client_id"), py::arg("username"), py::arg("password"),
             py::arg("special_code"), py::arg("shared_secret"), py::keep_alive<1, 2>())
        .def("update_devices_data", [](PyClient& c) { c.s().update_devices_data(); })
        .def("update_information", [](PyClient& c) { c.s().update_information(); })
        .def("devices", [](PyClient& c) { return format_all(c.s().devices(), records::format_device); })
        .def("states", [](PyClient& c) { return format_all(c.s().states(), records::format_state); })
        .def("scene", [](PyClient& c) { return c.s().scene(); })
        .def("command", [](PyClient& c, Oid oid, std::string_view action, std::string_view arg) {
            c.s().command(oid, action, arg);
        }, py::arg("oid"), py::arg("action"), py::arg("arg") = "")
        .def("define_schedule", [](PyClient& c, std::string_view line) { c.s().define_schedule(records::parse_schedule(line)); },
             py::arg("record"))
        .def("list_schedules", [](PyClient& c) { return format_all(c.s().list_schedules(), records::format_schedule); })
        .def("set_schedule_enabled", [](PyClient& c, std::string_view id, bool on) { c.s().set_schedule_enabled(id, on); },
             py::arg("id"), py::arg("enabled"))
        .def("define_rule", [](PyClient& c, std::string_view line) { c.s().define_rule(records::parse_rule(line)); },
             py::arg("record"))
        .def("list_rules", [](PyClient& c) { return format_all(c.s().list_rules(), records::format_rule); })
        .def("set_rule_enabled", [](PyClient& c, std::string_view id, bool on) { c.s().set_rule_enabled(id, on); },
             py::arg("id"), py::arg("enabled"))
        .def("sms_command", [](PyClient& c, Oid oid, std::string_view action, std::string_view arg) {
            c.s().sms_command(oid, action, arg);
        }, py::arg("oid"), py::arg("action"), py::arg("arg") = "")
        .def("sms_define_schedule",
             [](PyClient& c, std::string_view line) { c.s().sms_define_schedule(records::parse_schedule(line)); },
             py::arg("record"))
        .def("sms_define_rule", [](PyClient& c, std::string_view line) { c.s().sms_define_rule(records::parse_rule(line)); },
             py::arg("record"))
        .def_property_readonly("magic", [](PyClient& c) { return c.s().magic(); })
        .def_property_readonly("traffic", &PyClient::traffic, "Every request and response exchanged so far.");
}
