#include <sstream>

#include "fsm_model.hpp"
#include "test_util.hpp"

#include "httplib.h"

#include "sightwarp/session.hpp"
#include "sightwarp/transport.hpp"

using namespace sightwarp;
using namespace std::chrono_literals;

namespace {

std::string frame_line(std::int64_t t, bool pinch = false) {
    return encode(InboundMessage{FrameMsg{model::frame({model::GazeP::OnObject, model::HandP::Line040, pinch}, t)}})
        .dump();
}

std::string type_of(const std::string &line) { return Json::parse(line).at("type").get<std::string>(); }

} // namespace

TEST_SUITE("transport") {

TEST_CASE("tcp line server") {
    LineServer server("127.0.0.1", 0, 150ms);
    server.start();
    REQUIRE(server.port() != 0);
    LineClient client("127.0.0.1", server.port());

    client.send(encode(InboundMessage{LoadSceneMsg{model::scene()}}).dump());
    client.send(frame_line(0));
    std::string line = client.receive(2000ms);
    REQUIRE_FALSE(line.empty());
    CHECK(type_of(line) == "snapshot");
    CHECK(Json::parse(line)["state"] == "Hovering");

    client.send("not json");
    line = client.receive(2000ms);
    REQUIRE_FALSE(line.empty());
    CHECK(type_of(line) == "error");
    CHECK(Json::parse(line)["code"] == "bad-message");

    // the session survives the bad line
    client.send(frame_line(11, true));
    line = client.receive(2000ms);
    REQUIRE_FALSE(line.empty());
    CHECK(type_of(line) == "snapshot");
    CHECK(Json::parse(line)["t"] == 11);

    // idle connection gets heartbeats
    line = client.receive(2000ms);
    REQUIRE_FALSE(line.empty());
    CHECK(type_of(line) == "heartbeat");

    // each connection has its own session
    LineClient other("127.0.0.1", server.port());
    other.send(frame_line(0));
    line = other.receive(2000ms);
    REQUIRE_FALSE(line.empty());
    CHECK(Json::parse(line)["code"] == "no-scene");

    server.stop();
}

TEST_CASE("http bridge") {
    HttpBridge bridge("127.0.0.1", 0);
    bridge.start();
    REQUIRE(bridge.port() != 0);
    httplib::Client cli("127.0.0.1", bridge.port());

    auto health = cli.Get("/health");
    REQUIRE(health);
    CHECK(health->status == 200);
    CHECK(health->get_header_value("Access-Control-Allow-Origin") == "*");

    auto created = cli.Post("/sessions", "", "application/json");
    REQUIRE(created);
    CHECK(created->status == 201);
    const std::string id = Json::parse(created->body).at("session").get<std::string>();

    const std::string body = encode(InboundMessage{LoadSceneMsg{model::scene()}}).dump() + "\n" + frame_line(0) +
                             "\n" + frame_line(11) + "\n";
    auto reply = cli.Post("/sessions/" + id, body, "application/x-ndjson");
    REQUIRE(reply);
    CHECK(reply->status == 200);
    std::istringstream in(reply->body);
    std::vector<std::string> lines;
    for (std::string l; std::getline(in, l);) {
        if (!l.empty()) lines.push_back(l);
    }
    // two frames with the same pinch state coalesce into one snapshot
    REQUIRE(lines.size() == 1);
    CHECK(type_of(lines[0]) == "snapshot");
    CHECK(Json::parse(lines[0])["dropped_frames"] == 1);

    auto opt = cli.Options("/sessions/" + id);
    REQUIRE(opt);
    CHECK(opt->status == 204);

    auto missing = cli.Post("/sessions/999999", frame_line(0), "application/x-ndjson");
    REQUIRE(missing);
    CHECK(missing->status == 404);

    auto del = cli.Delete("/sessions/" + id);
    REQUIRE(del);
    CHECK(del->status == 204);
    auto again = cli.Post("/sessions/" + id, frame_line(22), "application/x-ndjson");
    REQUIRE(again);
    CHECK(again->status == 404);

    bridge.stop();
}

}
