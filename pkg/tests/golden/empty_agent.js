'use strict';

// generated hook agent
// plan ade504ba466ffdda23d9810e7832d13ca13d57d08d650cff06ea42e99e616b35
// target com.example.app

var PLAN_ID = "ade504ba466ffdda23d9810e7832d13ca13d57d08d650cff06ea42e99e616b35";
var TARGET = "com.example.app";
var BATTERY_PROPERTY_CAPACITY = 4;

var OVERRIDES = {};
var LATEST_SAMPLES = {};
var SENSOR_HOOKS = {};
var INSTALLED = [];
var RESTORED = false;

function reply(obj) {
  send(JSON.stringify(obj));
}

// Shared sensor delivery rewrite. Sensor stanzas register their type here;
// the dispatch interception is installed once, on the first registration.
function registerSensorHook(entry) {
  SENSOR_HOOKS[entry.sensorType] = entry;
  installSensorRewrite();
}

function installSensorRewrite() {
  if (installSensorRewrite.installed) {
    return;
  }
  installSensorRewrite.installed = true;
  var queue = Java.use('android.hardware.SystemSensorManager$SensorEventQueue');
  var dispatch = queue.dispatchSensorEvent.overload('int', '[F', 'int', 'long');
  dispatch.implementation = function (handle, values, accuracy, timestamp) {
    var entry = lookupHookedSensor(this, handle);
    if (entry !== null) {
      var spoofed = LATEST_SAMPLES[entry.sensor];
      if (spoofed !== undefined) {
        for (var i = 0; i < spoofed.length && i < values.length; i++) {
          values[i] = spoofed[i];
        }
      }
    }
    return dispatch.call(this, handle, values, accuracy, timestamp);
  };
  INSTALLED.push(function () {
    dispatch.implementation = null;
    installSensorRewrite.installed = false;
  });
}

function lookupHookedSensor(eventQueue, handle) {
  var sensor = eventQueue.mSensorsMap.value.get(handle);
  if (sensor === null) {
    return null;
  }
  var entry = SENSOR_HOOKS[sensor.getType()];
  return entry !== undefined ? entry : null;
}

function installHooks() {
  // empty plan: nothing to install
}

// restore: detach every interception and drop all overrides
function restoreAll() {
  if (RESTORED) {
    return;
  }
  RESTORED = true;
  while (INSTALLED.length > 0) {
    var undo = INSTALLED.pop();
    undo();
  }
  OVERRIDES = {};
  LATEST_SAMPLES = {};
  SENSOR_HOOKS = {};
}

function handleHostMessage(msg) {
  if (msg === null || typeof msg !== 'object' || typeof msg.type !== 'string' ||
      typeof msg.seq !== 'number') {
    reply({ type: 'nack', ref: msg && typeof msg.seq === 'number' ? msg.seq : -1,
            reason: 'malformed message' });
    return;
  }
  switch (msg.type) {
    case 'apply_plan':
      reply({ type: 'ack', ref: msg.seq });
      break;
    case 'sample':
      LATEST_SAMPLES[msg.sensor] = msg.values;
      reply({ type: 'ack', ref: msg.seq });
      break;
    case 'set_property':
      OVERRIDES[msg.key] = msg.value;
      reply({ type: 'ack', ref: msg.seq });
      break;
    case 'query':
      reply({ type: 'value', ref: msg.seq, key: msg.key,
              value: OVERRIDES[msg.key] !== undefined ? OVERRIDES[msg.key] : null });
      break;
    case 'restore':
      restoreAll();
      reply({ type: 'ack', ref: msg.seq });
      break;
    default:
      reply({ type: 'nack', ref: msg.seq, reason: 'unknown message type' });
  }
}

function pump() {
  recv(function (raw) {
    var msg = raw;
    if (typeof raw === 'string') {
      try {
        msg = JSON.parse(raw);
      } catch (e) {
        msg = null;
      }
    }
    handleHostMessage(msg);
    pump();
  });
}

installHooks();
pump();
