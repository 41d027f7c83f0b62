import { App } from './app.js';
import { CurationClient } from './api.js';
import { OfflineQueue } from './queue.js';

const TOKEN_KEY = 'entshift-annotator-token';

function annotatorToken(): string | null {
  let token = window.localStorage.getItem(TOKEN_KEY);
  if (!token) {
    token = window.prompt('annotator bearer token (leave empty if auth is off)') || '';
    window.localStorage.setItem(TOKEN_KEY, token);
  }
  return token || null;
}

const client = new CurationClient(window.location.origin, annotatorToken());
const queue = new OfflineQueue(window.localStorage);
const app = new App(client, queue, document.body);

void app.start();
