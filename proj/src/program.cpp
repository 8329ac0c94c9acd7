#include "horn/program.hpp"

namespace horn {

Program::Program(const std::vector<Expr>& roots, const LagrangianSpec* spec) : spec_(spec) {
    bool needs_models = false;
    for (Expr r : roots) needs_models = needs_models || contains_model_fn(r);
    if (needs_models) {
        if (!spec_) throw ExprError("model-function nodes need a Lagrangian spec to evaluate");
        has_models_ = true;
        phi_slot_ = static_cast<std::uint32_t>(compile(phi()));
        x_slot_ = static_cast<std::uint32_t>(compile(kinetic_x()));
    }
    for (Expr r : roots) roots_.push_back(static_cast<std::uint32_t>(compile(r)));
    slot_.clear();
}

int Program::compile(Expr root) {
    // Iterative post-order traversal; deep sums would overflow the call stack otherwise.
    std::vector<std::pair<Expr, bool>> stack{{root, false}};
    while (!stack.empty()) {
        auto [e, expanded] = stack.back();
        stack.pop_back();
        if (slot_.count(e)) continue;
        if (!expanded) {
            stack.push_back({e, true});
            if (e->kind == NodeKind::Sum)
                for (const Term& t : e->terms) stack.push_back({t.body, false});
            if (e->kind == NodeKind::Prod)
                for (const Factor& f : e->factors) stack.push_back({f.base, false});
            if (e->kind == NodeKind::Apply) stack.push_back({e->arg, false});
            continue;
        }
        Instr in{};
        switch (e->kind) {
            case NodeKind::Const:
                in.op = Op::Const;
                in.c = e->value.to_double();
                break;
            case NodeKind::Sym:
                in.op = Op::Input;
                in.a = e->sym;
                inputs_.push_back(e->sym);
                break;
            case NodeKind::Sum:
                in.op = Op::Sum;
                in.c = e->value.to_double();
                in.begin = static_cast<std::uint32_t>(arg_.size());
                for (const Term& t : e->terms) {
                    arg_.push_back(static_cast<std::uint32_t>(slot_.at(t.body)));
                    num_.push_back(t.coef.to_double());
                }
                in.end = static_cast<std::uint32_t>(arg_.size());
                break;
            case NodeKind::Prod:
                in.op = Op::Prod;
                in.begin = static_cast<std::uint32_t>(arg_.size());
                for (const Factor& f : e->factors) {
                    arg_.push_back(static_cast<std::uint32_t>(slot_.at(f.base)));
                    num_.push_back(f.exp);
                }
                in.end = static_cast<std::uint32_t>(arg_.size());
                break;
            case NodeKind::Apply:
                in.op = Op::Apply;
                in.elem = e->elem;
                in.a = static_cast<std::uint32_t>(slot_.at(e->arg));
                break;
            case NodeKind::Fn:
                if (!spec_) throw ExprError("model-function node " + e->fn.str() + " without a spec");
                in.op = Op::Model;
                in.a = static_cast<std::uint32_t>(models_.size());
                models_.push_back(spec_->model_derivative(e->fn));
                break;
        }
        slot_[e] = static_cast<int>(ops_.size());
        ops_.push_back(in);
    }
    return slot_.at(root);
}

double evaluate(Expr e, const JetPoint<double>& jp, const LagrangianSpec* spec) {
    return Program({e}, spec).run(jp).front();
}

}  // namespace horn
