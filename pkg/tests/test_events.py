"""Event propagation: upward error catches, kill semantics, broadcast signals,
terminate, event subprocesses, repeatable boundary handlers, event gateways."""

import pytest

from chainflow.services import EngineNode

from helpers import complete, instances_of, item_groups, parse_href, tree_addresses

NESTED_ERRORS = b"""<?xml version="1.0"?>
<definitions xmlns="http://www.omg.org/spec/BPMN/20100524/MODEL" id="d">
  <process id="P" name="P">
    <documentation>bool failFlag;</documentation>
    <startEvent id="p_start"/>
    <subProcess id="M" name="M">
      <multiInstanceLoopCharacteristics>
        <loopCardinality>2</loopCardinality>
      </multiInstanceLoopCharacteristics>
      <startEvent id="m_start"/>
      <parallelGateway id="m_fork"/>
      <subProcess id="S1" name="S1">
        <startEvent id="s1_start"/>
        <userTask id="T1" name="T1">
          <documentation>() : (bool fail) -> { failFlag = fail; }</documentation>
        </userTask>
        <exclusiveGateway id="s1_gw" default="s1_ok"/>
        <endEvent id="s1_err"><errorEventDefinition errorRef="E1"/></endEvent>
        <endEvent id="s1_done"/>
        <sequenceFlow id="s1_f0" sourceRef="s1_start" targetRef="T1"/>
        <sequenceFlow id="s1_f1" sourceRef="T1" targetRef="s1_gw"/>
        <sequenceFlow id="s1_fe" sourceRef="s1_gw" targetRef="s1_err">
          <conditionExpression>failFlag</conditionExpression>
        </sequenceFlow>
        <sequenceFlow id="s1_ok" sourceRef="s1_gw" targetRef="s1_done"/>
      </subProcess>
      <subProcess id="S2" name="S2">
        <startEvent id="s2_start"/>
        <subProcess id="S3" name="S3">
          <startEvent id="s3_start"/>
          <userTask id="T3" name="T3">
            <documentation>() : (bool fail) -> { failFlag = fail; }</documentation>
          </userTask>
          <exclusiveGateway id="s3_gw" default="s3_ok"/>
          <endEvent id="s3_err"><errorEventDefinition errorRef="E2"/></endEvent>
          <endEvent id="s3_done"/>
          <sequenceFlow id="s3_f0" sourceRef="s3_start" targetRef="T3"/>
          <sequenceFlow id="s3_f1" sourceRef="T3" targetRef="s3_gw"/>
          <sequenceFlow id="s3_fe" sourceRef="s3_gw" targetRef="s3_err">
            <conditionExpression>failFlag</conditionExpression>
          </sequenceFlow>
          <sequenceFlow id="s3_ok" sourceRef="s3_gw" targetRef="s3_done"/>
        </subProcess>
        <endEvent id="s2_done"/>
        <sequenceFlow id="s2_f0" sourceRef="s2_start" targetRef="S3"/>
        <sequenceFlow id="s2_f1" sourceRef="S3" targetRef="s2_done"/>
      </subProcess>
      <boundaryEvent id="bnd_e2" name="CatchE2" attachedToRef="S2">
        <errorEventDefinition errorRef="E2"/>
      </boundaryEvent>
      <userTask id="AfterE2" name="AfterE2"/>
      <endEvent id="m_done1"/>
      <endEvent id="m_done2"/>
      <endEvent id="m_done3"/>
      <sequenceFlow id="m_f0" sourceRef="m_start" targetRef="m_fork"/>
      <sequenceFlow id="m_f1" sourceRef="m_fork" targetRef="S1"/>
      <sequenceFlow id="m_f2" sourceRef="m_fork" targetRef="S2"/>
      <sequenceFlow id="m_f3" sourceRef="S1" targetRef="m_done1"/>
      <sequenceFlow id="m_f4" sourceRef="S2" targetRef="m_done2"/>
      <sequenceFlow id="m_f5" sourceRef="bnd_e2" targetRef="AfterE2"/>
      <sequenceFlow id="m_f6" sourceRef="AfterE2" targetRef="m_done3"/>
    </subProcess>
    <boundaryEvent id="bnd_e1" name="CatchE1" attachedToRef="M">
      <errorEventDefinition errorRef="E1"/>
    </boundaryEvent>
    <userTask id="HandleE1" name="HandleE1"/>
    <userTask id="AfterM" name="AfterM"/>
    <endEvent id="p_done"/>
    <endEvent id="p_done2"/>
    <sequenceFlow id="p_f0" sourceRef="p_start" targetRef="M"/>
    <sequenceFlow id="p_f1" sourceRef="M" targetRef="AfterM"/>
    <sequenceFlow id="p_f2" sourceRef="AfterM" targetRef="p_done"/>
    <sequenceFlow id="p_f3" sourceRef="bnd_e1" targetRef="HandleE1"/>
    <sequenceFlow id="p_f4" sourceRef="HandleE1" targetRef="p_done2"/>
  </process>
  <error id="E1" errorCode="E1"/>
  <error id="E2" errorCode="E2"/>
</definitions>
"""


@pytest.fixture
def nested():
    node = EngineNode()
    model_hash = node.deploy_model(NESTED_ERRORS)
    address, _ = node.create_instance(model_hash)
    return node, address


def test_inner_error_kills_only_its_scope(nested):
    node, address = nested
    state = node.instance_state(address)
    # two M instances, each with T1 and T3 running
    assert len(instances_of(state, "T1")) == 2
    assert len(instances_of(state, "T3")) == 2

    assert complete(node, state, "T3", {"fail": True}, which=0).accepted
    state = node.instance_state(address)
    # one M instance caught e2 at the S2 boundary: T3 gone, T1 survives,
    # the handler task is live; the sibling M instance is untouched
    assert len(instances_of(state, "AfterE2")) == 1
    assert len(instances_of(state, "T3")) == 1
    assert len(instances_of(state, "T1")) == 2


def test_outer_error_kills_all_instances_and_reroutes(nested):
    node, address = nested
    state = node.instance_state(address)
    m_instances = tree_addresses(node, address)[1:]
    assert len(m_instances) == 2

    assert complete(node, state, "T1", {"fail": True}, which=0).accepted
    for m in m_instances:
        assert node.ledger.call(m, "marking") == 0
        assert node.ledger.call(m, "startedActivities") == 0
    state = node.instance_state(address)
    assert list(item_groups(state)) == ["HandleE1"]
    assert complete(node, state, "HandleE1").accepted
    assert node.ledger.call(address, "isFinished") == 1


def test_clean_multi_instance_completion(nested):
    node, address = nested
    for _ in range(2):
        state = node.instance_state(address)
        assert complete(node, state, "T1", {"fail": False}).accepted
        state = node.instance_state(address)
        assert complete(node, state, "T3", {"fail": False}).accepted
    state = node.instance_state(address)
    assert list(item_groups(state)) == ["AfterM"]
    assert complete(node, state, "AfterM").accepted
    assert node.ledger.call(address, "isFinished") == 1


BROADCAST = b"""<?xml version="1.0"?>
<definitions xmlns="http://www.omg.org/spec/BPMN/20100524/MODEL" id="d">
  <process id="Root" name="Root">
    <startEvent id="r_start"/>
    <parallelGateway id="r_fork"/>
    <userTask id="Trigger" name="Trigger"/>
    <intermediateThrowEvent id="throw_sig">
      <signalEventDefinition signalRef="SIG"/>
    </intermediateThrowEvent>
    <userTask id="AfterThrow" name="AfterThrow"/>
    <callActivity id="c1_call" name="C1" calledElement="C1"/>
    <endEvent id="r_done1"/>
    <endEvent id="r_done2"/>
    <sequenceFlow id="r_f0" sourceRef="r_start" targetRef="r_fork"/>
    <sequenceFlow id="r_f1" sourceRef="r_fork" targetRef="Trigger"/>
    <sequenceFlow id="r_f2" sourceRef="r_fork" targetRef="c1_call"/>
    <sequenceFlow id="r_f3" sourceRef="Trigger" targetRef="throw_sig"/>
    <sequenceFlow id="r_f4" sourceRef="throw_sig" targetRef="AfterThrow"/>
    <sequenceFlow id="r_f5" sourceRef="AfterThrow" targetRef="r_done1"/>
    <sequenceFlow id="r_f6" sourceRef="c1_call" targetRef="r_done2"/>
  </process>
  <process id="C1" name="C1">
    <startEvent id="c1_start"/>
    <callActivity id="c2_call" name="C2" calledElement="C2"/>
    <endEvent id="c1_done"/>
    <sequenceFlow id="c1_f0" sourceRef="c1_start" targetRef="c2_call"/>
    <sequenceFlow id="c1_f1" sourceRef="c2_call" targetRef="c1_done"/>
  </process>
  <process id="C2" name="C2">
    <startEvent id="c2_start"/>
    <intermediateCatchEvent id="catch_sig" name="CatchSig">
      <signalEventDefinition signalRef="SIG"/>
    </intermediateCatchEvent>
    <userTask id="AfterCatch" name="AfterCatch"/>
    <endEvent id="c2_done"/>
    <sequenceFlow id="c2_f0" sourceRef="c2_start" targetRef="catch_sig"/>
    <sequenceFlow id="c2_f1" sourceRef="catch_sig" targetRef="AfterCatch"/>
    <sequenceFlow id="c2_f2" sourceRef="AfterCatch" targetRef="c2_done"/>
  </process>
  <signal id="SIG" name="SIG"/>
</definitions>
"""


def test_broadcast_signal_reaches_grandchild():
    node = EngineNode()
    address, _ = node.create_instance(node.deploy_model(BROADCAST))
    state = node.instance_state(address)
    # the grandchild's token is parked on the catching event: no workitem yet
    assert list(item_groups(state)) == ["Trigger"]
    grandchild = tree_addresses(node, address)[-1]
    assert node.ledger.call(grandchild, "marking") != 0

    assert complete(node, state, "Trigger").accepted
    state = node.instance_state(address)
    assert set(item_groups(state)) == {"AfterThrow", "AfterCatch"}
    assert complete(node, state, "AfterCatch").accepted
    state = node.instance_state(address)
    assert complete(node, state, "AfterThrow").accepted
    assert node.ledger.call(address, "isFinished") == 1


TERMINATE = b"""<?xml version="1.0"?>
<definitions xmlns="http://www.omg.org/spec/BPMN/20100524/MODEL" id="d">
  <process id="T" name="T">
    <startEvent id="start"/>
    <parallelGateway id="fork"/>
    <userTask id="A" name="A"/>
    <userTask id="B" name="B"/>
    <endEvent id="done_a"/>
    <endEvent id="kill_all"><terminateEventDefinition/></endEvent>
    <sequenceFlow id="f0" sourceRef="start" targetRef="fork"/>
    <sequenceFlow id="f1" sourceRef="fork" targetRef="A"/>
    <sequenceFlow id="f2" sourceRef="fork" targetRef="B"/>
    <sequenceFlow id="f3" sourceRef="A" targetRef="done_a"/>
    <sequenceFlow id="f4" sourceRef="B" targetRef="kill_all"/>
  </process>
</definitions>
"""


def test_terminate_end_event_kills_instance():
    node = EngineNode()
    address, _ = node.create_instance(node.deploy_model(TERMINATE))
    state = node.instance_state(address)
    a_href = instances_of(state, "A")[0]["href"]
    assert complete(node, state, "B").accepted
    assert node.ledger.call(address, "marking") == 0
    assert node.ledger.call(address, "startedActivities") == 0
    # the survivor task was interrupted: late check-in is rejected
    worklist, workitem_id = parse_href(a_href)
    receipt = node.execute_task(worklist, workitem_id, {})
    assert receipt.status == "rejected"


EVENT_SUBPROCESS = b"""<?xml version="1.0"?>
<definitions xmlns="http://www.omg.org/spec/BPMN/20100524/MODEL" id="d">
  <process id="R" name="R">
    <documentation>bool failFlag;</documentation>
    <startEvent id="start"/>
    <userTask id="Work" name="Work">
      <documentation>() : (bool fail) -> { failFlag = fail; }</documentation>
    </userTask>
    <exclusiveGateway id="gw" default="f_ok"/>
    <endEvent id="err"><errorEventDefinition errorRef="EX"/></endEvent>
    <endEvent id="done"/>
    <subProcess id="recovery" name="Recovery" triggeredByEvent="true">
      <startEvent id="rec_start" isInterrupting="true">
        <errorEventDefinition errorRef="EX"/>
      </startEvent>
      <userTask id="Recover" name="Recover"/>
      <endEvent id="rec_done"/>
      <sequenceFlow id="rec_f0" sourceRef="rec_start" targetRef="Recover"/>
      <sequenceFlow id="rec_f1" sourceRef="Recover" targetRef="rec_done"/>
    </subProcess>
    <sequenceFlow id="f0" sourceRef="start" targetRef="Work"/>
    <sequenceFlow id="f1" sourceRef="Work" targetRef="gw"/>
    <sequenceFlow id="f_err" sourceRef="gw" targetRef="err">
      <conditionExpression>failFlag</conditionExpression>
    </sequenceFlow>
    <sequenceFlow id="f_ok" sourceRef="gw" targetRef="done"/>
  </process>
  <error id="EX" errorCode="EX"/>
</definitions>
"""


def test_interrupting_event_subprocess_catches_error():
    node = EngineNode()
    model_hash = node.deploy_model(EVENT_SUBPROCESS)
    address, _ = node.create_instance(model_hash)
    state = node.instance_state(address)
    assert complete(node, state, "Work", {"fail": True}).accepted
    state = node.instance_state(address)
    assert list(item_groups(state)) == ["Recover"]
    assert complete(node, state, "Recover").accepted
    assert node.ledger.call(address, "isFinished") == 1

    # the clean path never triggers the handler
    address2, _ = node.create_instance(model_hash)
    state = node.instance_state(address2)
    assert complete(node, state, "Work", {"fail": False}).accepted
    assert node.ledger.call(address2, "isFinished") == 1


REPEATABLE_PING = b"""<?xml version="1.0"?>
<definitions xmlns="http://www.omg.org/spec/BPMN/20100524/MODEL" id="d">
  <process id="R" name="R">
    <startEvent id="start"/>
    <userTask id="LongTask" name="LongTask"/>
    <endEvent id="done"/>
    <boundaryEvent id="ping" name="Ping" attachedToRef="LongTask" cancelActivity="false">
      <messageEventDefinition messageRef="MsgPing"/>
    </boundaryEvent>
    <userTask id="HandlePing" name="HandlePing"/>
    <endEvent id="ping_done"/>
    <sequenceFlow id="f0" sourceRef="start" targetRef="LongTask"/>
    <sequenceFlow id="f1" sourceRef="LongTask" targetRef="done"/>
    <sequenceFlow id="f2" sourceRef="ping" targetRef="HandlePing"/>
    <sequenceFlow id="f3" sourceRef="HandlePing" targetRef="ping_done"/>
  </process>
  <message id="MsgPing" name="PING"/>
</definitions>
"""


def test_non_interrupting_boundary_spawns_repeatable_handlers():
    node = EngineNode()
    address, _ = node.create_instance(node.deploy_model(REPEATABLE_PING))
    state = node.instance_state(address)
    assert set(item_groups(state)) == {"LongTask", "Ping"}

    assert complete(node, state, "Ping").accepted
    state = node.instance_state(address)
    # a handler instance is running and the trigger re-armed
    assert len(instances_of(state, "HandlePing")) == 1
    assert len(instances_of(state, "Ping")) == 1
    assert complete(node, state, "Ping").accepted
    state = node.instance_state(address)
    assert len(instances_of(state, "HandlePing")) == 2

    # handler instances are independent children
    handlers = tree_addresses(node, address)[1:]
    assert len(handlers) == 2
    for handler in handlers:
        state = node.instance_state(address)
        assert complete(node, state, "HandlePing").accepted
    state = node.instance_state(address)
    assert complete(node, state, "LongTask").accepted
    assert node.ledger.call(address, "isFinished") == 1
    # the long task finished: the armed trigger is gone with it
    assert node.ledger.call(address, "startedActivities") == 0


EVENT_GATEWAY = b"""<?xml version="1.0"?>
<definitions xmlns="http://www.omg.org/spec/BPMN/20100524/MODEL" id="d">
  <process id="G" name="G">
    <startEvent id="start"/>
    <eventBasedGateway id="race"/>
    <intermediateCatchEvent id="msg_a" name="OptionA">
      <messageEventDefinition messageRef="MA"/>
    </intermediateCatchEvent>
    <intermediateCatchEvent id="msg_b" name="OptionB">
      <messageEventDefinition messageRef="MB"/>
    </intermediateCatchEvent>
    <userTask id="AfterA" name="AfterA"/>
    <userTask id="AfterB" name="AfterB"/>
    <endEvent id="done_a"/>
    <endEvent id="done_b"/>
    <sequenceFlow id="f0" sourceRef="start" targetRef="race"/>
    <sequenceFlow id="f1" sourceRef="race" targetRef="msg_a"/>
    <sequenceFlow id="f2" sourceRef="race" targetRef="msg_b"/>
    <sequenceFlow id="f3" sourceRef="msg_a" targetRef="AfterA"/>
    <sequenceFlow id="f4" sourceRef="msg_b" targetRef="AfterB"/>
    <sequenceFlow id="f5" sourceRef="AfterA" targetRef="done_a"/>
    <sequenceFlow id="f6" sourceRef="AfterB" targetRef="done_b"/>
  </process>
  <message id="MA" name="MA"/>
  <message id="MB" name="MB"/>
</definitions>
"""


def test_event_gateway_race():
    node = EngineNode()
    address, _ = node.create_instance(node.deploy_model(EVENT_GATEWAY))
    state = node.instance_state(address)
    assert set(item_groups(state)) == {"OptionA", "OptionB"}
    b_href = instances_of(state, "OptionB")[0]["href"]

    assert complete(node, state, "OptionA").accepted
    state = node.instance_state(address)
    assert list(item_groups(state)) == ["AfterA"]

    # the loser of the race is disabled
    worklist, workitem_id = parse_href(b_href)
    receipt = node.execute_task(worklist, workitem_id, {})
    assert receipt.status == "rejected"
    assert complete(node, state, "AfterA").accepted
    assert node.ledger.call(address, "isFinished") == 1


SEQUENTIAL_MI = b"""<?xml version="1.0"?>
<definitions xmlns="http://www.omg.org/spec/BPMN/20100524/MODEL" id="d">
  <process id="S" name="S">
    <startEvent id="start"/>
    <subProcess id="Loop" name="Loop">
      <multiInstanceLoopCharacteristics isSequential="true">
        <loopCardinality>3</loopCardinality>
      </multiInstanceLoopCharacteristics>
      <startEvent id="l_start"/>
      <userTask id="Step" name="Step"/>
      <endEvent id="l_done"/>
      <sequenceFlow id="l_f0" sourceRef="l_start" targetRef="Step"/>
      <sequenceFlow id="l_f1" sourceRef="Step" targetRef="l_done"/>
    </subProcess>
    <userTask id="After" name="After"/>
    <endEvent id="done"/>
    <sequenceFlow id="f0" sourceRef="start" targetRef="Loop"/>
    <sequenceFlow id="f1" sourceRef="Loop" targetRef="After"/>
    <sequenceFlow id="f2" sourceRef="After" targetRef="done"/>
  </process>
</definitions>
"""


def test_sequential_multi_instance_runs_one_at_a_time():
    node = EngineNode()
    address, _ = node.create_instance(node.deploy_model(SEQUENTIAL_MI))
    seen = set()
    for round_number in range(3):
        state = node.instance_state(address)
        steps = instances_of(state, "Step")
        assert len(steps) == 1, f"round {round_number}: {steps}"
        children = tree_addresses(node, address)[1:]
        assert len(children) == 1
        seen.update(children)
        assert complete(node, state, "Step").accepted
    assert len(seen) == 3
    state = node.instance_state(address)
    assert list(item_groups(state)) == ["After"]
    assert complete(node, state, "After").accepted
    assert node.ledger.call(address, "isFinished") == 1
