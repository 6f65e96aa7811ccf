"""cranor: orchestration service for simulated C-RAN network services.

Management plane for chained-VNF wireless services over a simulated
infrastructure: descriptor catalog, compute placement, spectrum pool,
lifecycle state machines with alarm-driven stop-and-redeploy
reconfiguration, per-service task queues, an internal metrics/alerting
store, and a deterministic scenario engine.
"""

__version__ = "0.1.0"
