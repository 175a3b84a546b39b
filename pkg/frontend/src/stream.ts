// WebSocket subscription to a session's server-push stream. Frames are
// parsed and forwarded; the socket sends nothing, matching the server's
// read-and-ignore contract.

import type { StreamFrame } from "./types.js";

export interface StreamHandle {
  close(): void;
}

export function openStream(
  url: string,
  onFrame: (frame: StreamFrame) => void,
  onClose: (wanted: boolean) => void,
): StreamHandle {
  const socket = new WebSocket(url);
  let wanted = false;

  socket.onmessage = (event: MessageEvent) => {
    if (typeof event.data !== "string") {
      return;
    }
    let frame: StreamFrame;
    try {
      frame = JSON.parse(event.data) as StreamFrame;
    } catch {
      return;
    }
    onFrame(frame);
  };
  socket.onclose = () => {
    onClose(wanted);
  };

  return {
    close(): void {
      wanted = true;
      socket.close();
    },
  };
}
