#include "meshsim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

#include "json.hpp"

namespace meshsim::sim {

using nlohmann::json;

void Scenario::validate(const Topology& topo) const {
    radio.validate();
    olsr.validate();
    negotiation.validate();
    if (!(horizon_s > 0.0)) throw Error("horizon must be > 0");
    if (!(tick_s > 0.0)) throw Error("tick must be > 0");
    if (!(control_loss >= 0.0 && control_loss <= 1.0)) throw Error("control_loss must lie in [0,1]");
    if (signaling_delay_s < 0.0) throw Error("signaling delay must be >= 0");

    auto known = [&](NodeId id, const std::string& what) {
        if (!topo.has_node(id)) throw Error(what + " references unknown node " + std::to_string(id));
    };
    std::set<int> ids;
    for (const auto& f : flows) {
        std::string what = "flow " + (f.name.empty() ? std::to_string(f.id) : f.name);
        if (!ids.insert(f.id).second) throw Error("duplicate flow id " + std::to_string(f.id));
        known(f.src, what);
        known(f.dst, what);
        if (f.src == f.dst) throw Error(what + " has the same source and destination");
        if (!(f.duration_s > 0.0)) throw Error(what + " needs a positive duration");
        if (f.start_s < 0.0) throw Error(what + " starts before time 0");
        if (f.start_s + f.duration_s > horizon_s + 1e-9) throw Error(what + " ends after the horizon");
        if (f.rate_mbps && !(*f.rate_mbps > 0.0)) throw Error(what + " needs a positive rate");
        if (!f.path.empty()) {
            if (f.path.size() < 2 || f.path.front() != f.src || f.path.back() != f.dst)
                throw Error(what + " path must run from source to destination");
            for (NodeId n : f.path) known(n, what);
        }
    }
    for (const auto& [e, ch] : pinned_channels) {
        known(e.a, "pinned channel");
        known(e.b, "pinned channel");
        if (!topo.adjacent(e.a, e.b))
            throw Error("pinned channel on non-adjacent pair " + std::to_string(e.a) + "-" + std::to_string(e.b));
        for (NodeId n : {e.a, e.b}) {
            bool tuned = false;
            for (const auto* i : topo.node(n).data_interfaces()) tuned |= i->channel.index == ch;
            if (!tuned)
                throw Error("pinned channel " + std::to_string(ch) + " is not tuned on node " +
                            topo.node(n).name);
        }
    }
    for (const auto& c : link_changes) {
        known(c.a, "link change");
        known(c.b, "link change");
        if (c.a == c.b) throw Error("link change is a self-loop");
    }
    for (const auto& [n, nets] : hna) known(n, "hna");
    for (const auto& i : interferers)
        for (NodeId n : i.nodes) known(n, "interferer");
    const auto& r = random_interferers;
    if (r.count < 0 || r.level_min_dbm > r.level_max_dbm || r.min_duration_s > r.max_duration_s ||
        r.min_duration_s < 0.0 || !(r.audible_probability >= 0.0 && r.audible_probability <= 1.0))
        throw Error("invalid random interferer settings");
}

void FlowMeter::advance(Time now) {
    if (running_) {
        double dt = (now - last_).seconds();
        bits_ += rate_mbps_ * 1e6 * dt;
        if (latency_) {
            latency_weighted_ += *latency_ * dt;
            latency_time_ += dt;
        }
    }
    last_ = now;
}

void FlowMeter::set_rate(Time now, double mbps, std::optional<double> latency_ms) {
    advance(now);
    running_ = true;
    rate_mbps_ = mbps;
    latency_ = latency_ms;
}

void FlowMeter::stop(Time now) {
    advance(now);
    running_ = false;
}

double FlowMeter::mean_latency_ms() const {
    return latency_time_ > 0.0 ? latency_weighted_ / latency_time_ : 0.0;
}

namespace {

std::size_t olsr_size(const olsr::Message& m) {
    std::size_t bytes = 16;
    if (const auto* h = std::get_if<olsr::HelloBody>(&m.body))
        for (const auto& b : h->blocks) bytes += 4 + 12 * b.neighbors.size();
    else if (const auto* t = std::get_if<olsr::TcBody>(&m.body))
        bytes += 4 + 8 * t->neighbors.size();
    else if (const auto* a = std::get_if<olsr::MidBody>(&m.body))
        bytes += 4 * a->addresses.size();
    else if (const auto* n = std::get_if<olsr::HnaBody>(&m.body))
        bytes += 8 * n->networks.size();
    return bytes;
}

std::string msg_key(olsr::MsgType t) {
    switch (t) {
        case olsr::MsgType::Hello: return "hello";
        case olsr::MsgType::Tc: return "tc";
        case olsr::MsgType::Mid: return "mid";
        case olsr::MsgType::Hna: return "hna";
    }
    return "olsr";
}

Band data_band(const Node& n) {
    auto data = n.data_interfaces();
    return data.front()->channel.band;
}

std::vector<int> data_channels(const Node& n) {
    std::vector<int> out;
    Band b = data_band(n);
    for (const auto* i : n.data_interfaces())
        if (i->channel.band == b && std::find(out.begin(), out.end(), i->channel.index) == out.end())
            out.push_back(i->channel.index);
    return out;
}

}  // namespace

Simulator::Simulator(Scenario scenario, std::uint64_t seed, std::ostream* trace)
    : scenario_(std::move(scenario)), seed_(seed), trace_(trace), rng_(seed) {
    setup();
}

Simulator::~Simulator() = default;

double Simulator::uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

bool Simulator::lose_control() {
    if (scenario_.control_loss <= 0.0) return false;
    return uniform() < scenario_.control_loss;
}

void Simulator::charge(std::size_t bytes) {
    if (scenario_.charge_control) signaling_bits_ += 8.0 * static_cast<double>(bytes);
}

void Simulator::note(const std::string& diag) {
    if (std::find(diagnostics_.begin(), diagnostics_.end(), diag) == diagnostics_.end())
        diagnostics_.push_back(diag);
}

void Simulator::trace(const std::string& line) {
    if (trace_) *trace_ << line << '\n';
}

void Simulator::schedule(Time at, std::function<void()> action) {
    if (at < now_) throw Error("cannot schedule an event in the past");
    queue_.push(Event{at, seq_++, std::move(action)});
}

void Simulator::run_until(Time t) {
    while (!queue_.empty() && queue_.top().at <= t) {
        Event ev = queue_.top();
        queue_.pop();
        now_ = ev.at;
        ++events_;
        ev.action();
    }
    if (now_ < t) now_ = t;
}

olsr::Node& Simulator::olsr_node(NodeId id) {
    auto it = olsr_.find(id);
    if (it == olsr_.end()) throw Error("node " + std::to_string(id) + " runs no routing engine");
    return *it->second;
}

bonding::Bond& Simulator::bond(NodeId id) {
    auto it = bonds_.find(id);
    if (it == bonds_.end()) throw Error("node " + std::to_string(id) + " has no bond");
    return *it->second;
}

negotiation::Agent* Simulator::agent(NodeId id) {
    auto it = agents_.find(id);
    return it == agents_.end() ? nullptr : it->second.get();
}

void Simulator::setup() {
    topo_ = build_topology(scenario_.topology);
    scenario_.validate(topo_);
    const Time horizon = Time::from_seconds(scenario_.horizon_s);
    const bool full = scenario_.stack == StackMode::Full;

    for (const auto& n : topo_.nodes()) {
        Address bond_ip = n.data_interfaces().front()->ip;
        addr_map_[n.signaling().ip] = bond_ip;
        bond_owner_[bond_ip] = n.id;
    }

    // Channels: pinned links first, the rest by the alternating rule over
    // channels tuned at both ends.
    if (!topo_.nodes().empty()) {
        Band band = data_band(topo_.nodes().front());
        std::set<int> all;
        for (const auto& n : topo_.nodes())
            if (data_band(n) == band)
                for (int c : data_channels(n)) all.insert(c);
        auto usable = [&](const Edge& e, int ch) {
            auto a = data_channels(topo_.node(e.a));
            auto b = data_channels(topo_.node(e.b));
            return std::find(a.begin(), a.end(), ch) != a.end() && std::find(b.begin(), b.end(), ch) != b.end();
        };
        if (!all.empty())
            assignment_ = negotiation::initial_assignment(topo_, band, {all.begin(), all.end()}, usable);
        for (const auto& [e, ch] : scenario_.pinned_channels)
            assignment_[e] = Channel::make(topo_.node(e.a).data_interfaces().front()->channel.band, ch);
        for (const auto& e : topo_.adjacency())
            if (!assignment_.contains(e))
                note("link " + topo_.node(e.a).name + "-" + topo_.node(e.b).name + " has no common data channel");
    }

    // Random interferers come from the seed.
    interferers_ = scenario_.interferers;
    for (int k = 0; k < scenario_.random_interferers.count && !topo_.nodes().empty(); ++k) {
        const auto& r = scenario_.random_interferers;
        Band band = data_band(topo_.nodes().front());
        auto list = band_channels(band);
        negotiation::Interferer i;
        i.channel = Channel::make(band, list[std::min(list.size() - 1, static_cast<std::size_t>(uniform() * list.size()))]);
        i.level_dbm = r.level_min_dbm + uniform() * (r.level_max_dbm - r.level_min_dbm);
        double on = uniform() * scenario_.horizon_s;
        double len = r.min_duration_s + uniform() * (r.max_duration_s - r.min_duration_s);
        i.on = Time::from_seconds(on);
        i.off = Time::from_seconds(on + len);
        for (const auto& n : topo_.nodes())
            if (uniform() < r.audible_probability) i.nodes.push_back(n.id);
        interferers_.push_back(std::move(i));
    }
    for (std::size_t k = 0; k < interferers_.size(); ++k) {
        const auto& i = interferers_[k];
        auto log = [this, k](bool on) {
            if (!trace_) return;
            const auto& it = interferers_[k];
            trace(json{{"t", now_.seconds()}, {"type", on ? "interferer_on" : "interferer_off"},
                       {"channel", to_string(it.channel)}, {"dbm", it.level_dbm}}
                      .dump());
        };
        if (i.on <= horizon) schedule(i.on, [log] { log(true); });
        if (i.off <= horizon) schedule(i.off, [log] { log(false); });
    }

    auto every = [this, horizon](Time first, Time period, std::function<void()> fn) {
        auto loop = std::make_shared<std::function<void(Time)>>();
        *loop = [this, horizon, period, fn, loop](Time at) {
            schedule(at, [this, horizon, period, fn, loop] {
                fn();
                Time next = now_ + period;
                if (next <= horizon) (*loop)(next);
            });
        };
        if (first <= horizon) (*loop)(first);
    };

    if (full) {
        std::size_t k = 0;
        for (const auto& n : topo_.nodes()) {
            auto engine = std::make_unique<olsr::Node>(n.signaling().ip, scenario_.olsr);
            engine->state().iface_name = n.signaling().name;
            if (auto it = scenario_.hna.find(n.id); it != scenario_.hna.end()) engine->state().local_hna = it->second;
            if (scenario_.olsr.emit_mid) engine->state().local_aliases = {addr_map_[n.signaling().ip]};
            olsr_[n.id] = std::move(engine);
            bonds_[n.id] = std::make_unique<bonding::Bond>(bonding::enslave(n));

            NodeId id = n.id;
            Time stagger = Time::from_us(static_cast<std::int64_t>(k) * 10000);
            const auto& p = scenario_.olsr;
            every(stagger, Time::from_seconds(p.hello_interval),
                  [this, id] { send_olsr(id, olsr_[id]->hello(now_)); });
            every(Time::from_seconds(p.tc_interval) + stagger, Time::from_seconds(p.tc_interval), [this, id] {
                if (auto m = olsr_[id]->tc(now_)) send_olsr(id, *m);
            });
            every(Time::from_seconds(p.mid_interval) + stagger, Time::from_seconds(p.mid_interval), [this, id] {
                if (auto m = olsr_[id]->mid(now_)) send_olsr(id, *m);
            });
            every(Time::from_seconds(p.hna_interval) + stagger, Time::from_seconds(p.hna_interval), [this, id] {
                if (auto m = olsr_[id]->hna(now_)) send_olsr(id, *m);
            });
            ++k;
        }

        for (const auto& n : topo_.nodes()) {
            std::vector<int> allowed = scenario_.negotiation.allowed_channels;
            if (allowed.empty()) allowed = data_channels(n);
            Band band = data_band(n);
            auto scan = [this, band](NodeId node, Time t) {
                return negotiation::default_scan(topo_, interferers_, node, t, band);
            };
            auto a = std::make_unique<negotiation::Agent>(n.id, band, allowed, to_string(bonds_[n.id]->unified_mac()),
                                                          scenario_.negotiation, scan);
            for (NodeId peer : topo_.neighbors(n.id)) {
                Edge e = Edge::of(n.id, peer);
                Address peer_ip = addr_map_[topo_.node(peer).signaling().ip];
                auto ch = assignment_.find(e);
                if (scenario_.pinned_channels.contains(e)) {
                    negotiation::NegotiationPacket pkt{peer_ip, to_string(bonds_[peer]->unified_mac()), ch->second.index,
                                                       ch->second.index};
                    bonds_[n.id]->store_packet(pkt);
                    channel_history_[{n.id, peer}].push_back({0.0, ch->second.index});
                    continue;
                }
                a->add_peer(peer, peer_ip, ch == assignment_.end() ? 0 : ch->second.index);
            }
            agents_[n.id] = std::move(a);
        }
        every(Time::from_seconds(scenario_.negotiation.first_round_s),
              Time::from_seconds(scenario_.negotiation.round_period_s), [this] { start_negotiation_round(); });
    }

    for (const auto& c : scenario_.link_changes) {
        LinkChange ch = c;
        schedule(Time::from_seconds(c.at_s), [this, ch] {
            topo_.set_edge(ch.a, ch.b, ch.up);
            trace(json{{"t", now_.seconds()}, {"type", "link"}, {"a", ch.a}, {"b", ch.b}, {"up", ch.up}}.dump());
            for (std::size_t i = 0; i < flows_.size(); ++i)
                if (flows_[i].active) flow_tick(i);
        });
    }

    for (const auto& f : scenario_.flows) {
        FlowRuntime fr;
        fr.flow = f;
        flows_.push_back(std::move(fr));
    }
    for (std::size_t i = 0; i < flows_.size(); ++i) {
        const Flow& f = flows_[i].flow;
        Time start = Time::from_seconds(f.start_s);
        Time end = Time::from_seconds(f.start_s + f.duration_s);
        Time tick = Time::from_seconds(scenario_.tick_s);
        schedule(start, [this, i, tick, end] {
            flows_[i].active = true;
            auto loop = std::make_shared<std::function<void()>>();
            *loop = [this, i, tick, end, loop] {
                if (!flows_[i].active) return;
                flow_tick(i);
                if (now_ + tick < end) schedule(now_ + tick, *loop);
            };
            (*loop)();
        });
        schedule(end, [this, i] {
            flows_[i].meter.stop(now_);
            flows_[i].active = false;
            refresh_rates();
        });
    }
}

void Simulator::send_olsr(NodeId from, const olsr::Message& m) {
    ++messages_[msg_key(m.type) + "_tx"];
    charge(olsr_size(m));
    if (trace_)
        trace(json{{"t", now_.seconds()}, {"type", "olsr"}, {"node", from}, {"msg", m.dump()}}.dump());
    Time at = now_ + Time::from_seconds(scenario_.signaling_delay_s);
    for (NodeId v : topo_.neighbors(from)) {
        if (lose_control()) {
            ++messages_["control_lost"];
            continue;
        }
        schedule(at, [this, v, from, m] { deliver_olsr(v, from, m); });
    }
}

void Simulator::deliver_olsr(NodeId to, NodeId from, olsr::Message m) {
    route_cache_.clear();
    Address sender = topo_.node(from).signaling().ip;
    auto fwd = olsr_node(to).receive(m, sender, now_);
    if (fwd) {
        ++messages_["olsr_forward"];
        send_olsr(to, *fwd);
    }
}

void Simulator::start_negotiation_round() {
    for (auto& [id, a] : agents_) handle_outbox(id, a->start_round(now_));
}

void Simulator::handle_outbox(NodeId who, negotiation::Outbox&& out) {
    Time at = now_ + Time::from_seconds(scenario_.signaling_delay_s);
    for (auto& m : out.messages) {
        ++messages_["negotiation_tx"];
        charge(64 + (m.quality ? 8 * m.quality->size() : 0));
        if (lose_control()) {
            ++messages_["control_lost"];
            continue;
        }
        schedule(at, [this, m] { deliver_negotiation(m); });
    }
    for (const auto& p : out.published) {
        bonds_[who]->store_packet(p);
        auto owner = bond_owner_.find(p.dir_ip);
        if (owner != bond_owner_.end()) {
            auto& hist = channel_history_[{who, owner->second}];
            if (p.channel != 0 && (hist.empty() || hist.back().channel != p.channel))
                hist.push_back({now_.seconds(), p.channel});
        }
        if (trace_)
            trace(json{{"t", now_.seconds()}, {"type", "publish"}, {"node", who}, {"dir_ip", to_string(p.dir_ip)},
                       {"channel", p.channel}, {"channel_meu", p.channel_meu}}
                      .dump());
    }
    for (const auto& t : out.timers) {
        schedule(now_ + Time::from_seconds(scenario_.negotiation.timeout_s), [this, who, t] {
            handle_outbox(who, agents_[who]->on_timeout(t, now_));
        });
    }
}

void Simulator::deliver_negotiation(negotiation::Msg m) {
    auto it = agents_.find(m.to);
    if (it == agents_.end()) return;
    if (trace_)
        trace(json{{"t", now_.seconds()}, {"type", "negotiation"}, {"from", m.from}, {"to", m.to},
                   {"kind", negotiation::to_string(m.kind)}, {"channel", m.channel}}
                  .dump());
    handle_outbox(m.to, it->second->on_message(m, now_));
}

const olsr::RouteTable& Simulator::cached_routes(NodeId id) {
    auto it = route_cache_.find(id);
    if (it != route_cache_.end() && it->second.first == now_) return it->second.second;
    auto& engine = olsr_node(id);
    auto remapped = olsr::remap_routes(engine.routes(now_), addr_map_, topo_.node(id).signaling().name,
                                       bonds_.at(id)->name());
    for (const auto& d : remapped.diagnostics) note(d);
    auto& slot = route_cache_[id];
    slot = {now_, std::move(remapped.routes)};
    return slot.second;
}

olsr::RouteTable Simulator::routes(NodeId id) { return cached_routes(id); }

std::vector<NodeId> Simulator::static_path(NodeId src, NodeId dst) const {
    std::map<NodeId, NodeId> parent;
    std::deque<NodeId> queue{src};
    parent[src] = src;
    while (!queue.empty()) {
        NodeId u = queue.front();
        queue.pop_front();
        if (u == dst) break;
        for (NodeId v : topo_.neighbors(u))
            if (!parent.contains(v)) {
                parent[v] = u;
                queue.push_back(v);
            }
    }
    if (!parent.contains(dst)) return {};
    std::vector<NodeId> path{dst};
    while (path.back() != src) path.push_back(parent[path.back()]);
    std::reverse(path.begin(), path.end());
    return path;
}

std::vector<NodeId> Simulator::flow_path(const Flow& f) {
    if (!f.path.empty()) return f.path;
    if (scenario_.stack == StackMode::Bare) return static_path(f.src, f.dst);

    Address target = addr_map_.at(topo_.node(f.dst).signaling().ip);
    std::vector<NodeId> path{f.src};
    NodeId cur = f.src;
    while (cur != f.dst) {
        const auto& table = cached_routes(cur);
        auto r = std::find_if(table.begin(), table.end(),
                              [&](const olsr::RouteEntry& e) { return !e.hna && e.destination == target; });
        if (r == table.end()) return {};
        auto owner = bond_owner_.find(r->next_hop);
        if (owner == bond_owner_.end()) return {};
        cur = owner->second;
        if (std::find(path.begin(), path.end(), cur) != path.end()) return {};
        path.push_back(cur);
    }
    return path;
}

std::vector<Hop> Simulator::build_hops(FlowRuntime& fr, const std::vector<NodeId>& path, bool transmit) {
    std::vector<Hop> hops;
    if (path.size() < 2) return hops;
    if (scenario_.stack == StackMode::Bare) {
        for (std::size_t i = 1; i < path.size(); ++i) {
            if (!topo_.adjacent(path[i - 1], path[i])) return {};
            auto ch = assignment_.find(Edge::of(path[i - 1], path[i]));
            if (ch == assignment_.end()) return {};
            const Interface* t = topo_.node(path[i - 1]).data_interface_on(ch->second);
            const Interface* r = topo_.node(path[i]).data_interface_on(ch->second);
            if (!t || !r) return {};
            hops.push_back({path[i - 1], path[i], ch->second, t->id, r->id});
        }
        return hops;
    }

    PacketRecord pkt{fr.flow.src, fr.flow.dst, 1500, fr.flow.id, PacketKind::Data};
    auto pick = [&](NodeId tx, NodeId rx) -> const Interface& {
        auto& b = *bonds_.at(tx);
        Address nh = addr_map_.at(topo_.node(rx).signaling().ip);
        if (!transmit) return b.resolve(nh);
        auto before = b.counters().switches;
        const Interface& out = b.xmit_select(pkt, nh);
        fr.switches += b.counters().switches - before;
        return out;
    };
    for (std::size_t i = 1; i < path.size(); ++i) {
        NodeId tx = path[i - 1];
        NodeId rx = path[i];
        const Interface& slave = pick(tx, rx);
        const Interface* r = topo_.node(rx).data_interface_on(slave.channel);
        if (!topo_.adjacent(tx, rx) || !r) {
            note("hop " + topo_.node(tx).name + "->" + topo_.node(rx).name + " unusable on " +
                 to_string(slave.channel));
            return {};
        }
        hops.push_back({tx, rx, slave.channel, slave.id, r->id});
    }
    if (transmit && fr.flow.protocol == Protocol::TcpLike) {
        PacketRecord ack{fr.flow.dst, fr.flow.src, 40, fr.flow.id, PacketKind::Data};
        for (std::size_t i = path.size() - 1; i > 0; --i) {
            auto& b = *bonds_.at(path[i]);
            auto before = b.counters().switches;
            b.xmit_select(ack, addr_map_.at(topo_.node(path[i - 1]).signaling().ip));
            fr.switches += b.counters().switches - before;
        }
    }
    return hops;
}

void Simulator::flow_tick(std::size_t index) {
    auto& fr = flows_[index];
    auto path = flow_path(fr.flow);
    fr.hops = build_hops(fr, path, true);
    fr.routed = !fr.hops.empty();
    if (fr.routed) fr.path = path;
    if (!fr.routed) {
        note("flow " + std::to_string(fr.flow.id) + " was left without a usable route");
        ++messages_["unrouted_ticks"];
    }
    ++messages_["data_ticks"];
    refresh_rates();
}

void Simulator::refresh_rates() {
    std::vector<PathLoad> loads;
    std::vector<std::size_t> owners;
    for (std::size_t i = 0; i < flows_.size(); ++i)
        if (flows_[i].active && flows_[i].routed) {
            loads.push_back({flows_[i].hops, flows_[i].flow.protocol});
            owners.push_back(i);
        }
    auto rates = evaluate_paths(topo_, loads, scenario_.radio);
    for (std::size_t i = 0; i < flows_.size(); ++i) {
        auto& fr = flows_[i];
        if (!fr.active) continue;
        auto k = std::find(owners.begin(), owners.end(), i);
        if (k == owners.end()) {
            fr.meter.set_rate(now_, 0.0);
            if (trace_)
                trace(json{{"t", now_.seconds()}, {"type", "rate"}, {"flow", fr.flow.id}, {"mbps", 0.0}}.dump());
            continue;
        }
        double rate = rates[static_cast<std::size_t>(k - owners.begin())];
        double phy = topo_.node(fr.flow.src).data_interfaces().front()->rate_mbps;
        rate = std::min(rate, fr.flow.rate_mbps.value_or(phy));
        double latency = path_latency_ms(fr.hops.size(), scenario_.radio, scenario_.stack);
        fr.meter.set_rate(now_, rate, latency);
        if (trace_)
            trace(json{{"t", now_.seconds()}, {"type", "rate"}, {"flow", fr.flow.id}, {"mbps", rate}}.dump());
    }
}

RunStats Simulator::stats() {
    RunStats s;
    s.scenario = scenario_.name;
    s.seed = seed_;
    for (auto& fr : flows_) {
        if (fr.active) fr.meter.stop(now_);
        FlowResult r;
        r.id = fr.flow.id;
        r.name = fr.flow.name;
        r.src = fr.flow.src;
        r.dst = fr.flow.dst;
        r.protocol = fr.flow.protocol;
        r.delivered_bits = fr.meter.delivered_bits();
        r.mbps = r.delivered_bits / fr.flow.duration_s / 1e6;
        r.latency_ms = fr.meter.mean_latency_ms();
        r.switches = fr.switches;
        double phy = topo_.node(fr.flow.src).data_interfaces().front()->rate_mbps;
        r.offered_bits = fr.flow.rate_mbps.value_or(phy) * 1e6 * fr.flow.duration_s;
        r.routed = fr.meter.busy_seconds() > 0.0;
        r.last_path = fr.path;
        s.flows.push_back(std::move(r));
    }
    for (const auto& [id, b] : bonds_) s.bonding[id] = b->counters();
    s.channel_history = channel_history_;
    s.messages = messages_;
    for (const auto& [id, a] : agents_) {
        s.messages["negotiation_rounds"] += a->stats().rounds;
        s.messages["negotiation_switches"] += a->stats().switches;
        s.messages["negotiation_timeouts"] += a->stats().timeouts;
    }
    for (const auto& [id, o] : olsr_) {
        const auto& c = o->state().counters;
        s.messages["olsr_duplicates"] += c.duplicates;
        s.messages["olsr_malformed"] += c.malformed;
        s.messages["olsr_stale_tc"] += c.stale_tc;
    }
    s.diagnostics = diagnostics_;
    if (scenario_.charge_control && !topo_.nodes().empty()) {
        double cap = topo_.nodes().front().signaling().rate_mbps * 1e6 * now_.seconds();
        s.signaling_utilization = cap > 0.0 ? signaling_bits_ / cap : 0.0;
    }
    s.events = events_;
    return s;
}

RunStats run(const Scenario& scenario, std::uint64_t seed, std::ostream* trace) {
    Simulator sim(scenario, seed, trace);
    sim.run_until(Time::from_seconds(scenario.horizon_s));
    return sim.stats();
}

double measure_flow(Simulator& sim, const Flow& flow) {
    auto path = sim.flow_path(flow);
    if (path.size() < 2) return 0.0;
    std::vector<Hop> hops;
    const auto& topo = sim.topology();
    if (sim.scenario().stack == StackMode::Bare) {
        try {
            hops = hops_for_path(topo, sim.assignment(), path);
        } catch (const TopologyError&) {
            return 0.0;
        }
    } else {
        for (std::size_t i = 1; i < path.size(); ++i) {
            Address nh = sim.address_map().at(topo.node(path[i]).signaling().ip);
            const Interface& slave = sim.bond(path[i - 1]).resolve(nh);
            const Interface* r = topo.node(path[i]).data_interface_on(slave.channel);
            if (!r || !topo.adjacent(path[i - 1], path[i])) return 0.0;
            hops.push_back({path[i - 1], path[i], slave.channel, slave.id, r->id});
        }
    }
    double rate = evaluate_paths(topo, {PathLoad{hops, flow.protocol}}, sim.scenario().radio).front();
    double phy = topo.node(flow.src).data_interfaces().front()->rate_mbps;
    return std::min(rate, flow.rate_mbps.value_or(phy));
}

}  // namespace meshsim::sim
